#pragma once

#include "eventcast/core/time_series.hpp"

#include <Eigen/Dense>
#include <json.hpp>

namespace eventcast {

nlohmann::json to_json(const TransformSpec& spec);
TransformSpec transform_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TimeSeries& series);
TimeSeries series_from_json(const nlohmann::json& j);

/// Row-major nested arrays.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// Checks a `{"format": ..., "version": ...}` envelope; throws ParseError on mismatch.
void check_format(const nlohmann::json& j, std::string_view format, int version);

} // namespace eventcast
