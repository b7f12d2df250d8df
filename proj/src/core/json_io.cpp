#include "eventcast/core/json_io.hpp"

#include "eventcast/error.hpp"

namespace eventcast {

nlohmann::json to_json(const TransformSpec& spec) {
	switch (spec.kind) {
	case TransformKind::None: return {{"kind", "none"}};
	case TransformKind::Log: return {{"kind", "log"}};
	case TransformKind::BoxCox: return {{"kind", "boxcox"}, {"lambda", spec.lambda}};
	}
	return {};
}

TransformSpec transform_from_json(const nlohmann::json& j) {
	const auto kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
	if (kind == "none") return TransformSpec::none();
	if (kind == "log") return TransformSpec::log();
	if (kind == "boxcox") return TransformSpec::box_cox(j.at("lambda").get<double>());
	throw Error(ErrorCode::InvalidArgument, "unknown transform kind '" + kind + "'", "transform.kind");
}

nlohmann::json to_json(const TimeSeries& series) {
	return {{"start", series.start().to_iso()}, {"name", series.name()}, {"values", series.values()}};
}

TimeSeries series_from_json(const nlohmann::json& j) {
	return TimeSeries(Date::parse(j.at("start").get<std::string>()), j.at("values").get<std::vector<double>>(),
	                  j.value("name", std::string{}));
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
	nlohmann::json rows = nlohmann::json::array();
	for (Eigen::Index i = 0; i < m.rows(); ++i) {
		nlohmann::json row = nlohmann::json::array();
		for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
		rows.push_back(std::move(row));
	}
	return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
	const auto rows = j.at("rows").get<Eigen::Index>();
	const auto cols = j.at("cols").get<Eigen::Index>();
	const auto& data = j.at("data");
	if (static_cast<Eigen::Index>(data.size()) != rows) {
		throw Error(ErrorCode::ParseError, "matrix row count mismatch");
	}
	Eigen::MatrixXd m(rows, cols);
	for (Eigen::Index i = 0; i < rows; ++i) {
		const auto& row = data[static_cast<std::size_t>(i)];
		if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::ParseError, "ragged matrix");
		for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
	}
	return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
	return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
	const auto values = j.get<std::vector<double>>();
	return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void check_format(const nlohmann::json& j, std::string_view format, int version) {
	if (!j.is_object() || !j.contains("format") || j.at("format") != format) {
		throw Error(ErrorCode::ParseError, "expected a '" + std::string(format) + "' document");
	}
	if (j.value("version", 0) != version) {
		throw Error(ErrorCode::ParseError, "unsupported " + std::string(format) + " version " +
		                                       std::to_string(j.value("version", 0)));
	}
}

} // namespace eventcast
