#include "eventcast/core/csv.hpp"
#include "eventcast/core/date.hpp"
#include "eventcast/core/json_io.hpp"
#include "eventcast/core/time_series.hpp"

#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace eventcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Date kStart = Date::from_ymd(2017, 1, 2);

TimeSeries ts(std::vector<double> v) { return TimeSeries(kStart, std::move(v)); }

void check_values(const TimeSeries& s, const std::vector<double>& expected, double tol = 1e-12) {
	REQUIRE(s.size() == expected.size());
	for (std::size_t i = 0; i < expected.size(); ++i) CHECK_THAT(s[i], WithinAbs(expected[i], tol));
}

} // namespace

TEST_CASE("dates use Monday = 0 and ISO text", "[date]") {
	const Date monday = Date::from_ymd(2017, 1, 2);
	CHECK(monday.weekday() == 0);
	CHECK((monday + 6).weekday() == 6);
	CHECK(Date::parse("2017-01-02") == monday);
	CHECK(monday.to_iso() == "2017-01-02");
	CHECK(Date::parse("2016-02-29").day_of_year() == 59);
	CHECK(Date::from_ymd(1970, 1, 1).days() == 0);
	REQUIRE_ERROR_CODE(Date::parse("2017-02-30"), ErrorCode::ParseError);
	REQUIRE_ERROR_CODE(Date::parse("17-1-2"), ErrorCode::ParseError);
}

TEST_CASE("series rejects empty and non-finite input", "[series]") {
	REQUIRE_ERROR_CODE(TimeSeries(kStart, {}), ErrorCode::InvalidArgument);
	REQUIRE_ERROR_CODE(TimeSeries(kStart, {1.0, std::nan("")}), ErrorCode::InvalidArgument);
	const auto s = ts({1, 2, 3, 4});
	CHECK(s.end() == kStart + 3);
	CHECK(s.slice({kStart + 1, kStart + 2}).values() == std::vector<double>{2, 3});
	REQUIRE_ERROR_CODE(require_non_negative(ts({1, -1})), ErrorCode::NegativeValue);
}

TEST_CASE("transform examples", "[transform]") {
	check_values(transform(ts({1, std::numbers::e}), TransformSpec::log()), {0, 1});
	check_values(transform(ts({5, 9}), TransformSpec::box_cox(1.0)), {4, 8});
	check_values(transform(ts({4}), TransformSpec::box_cox(0.5)), {2.0});
	check_values(transform(ts({3, -2}), TransformSpec::none()), {3, -2});
}

TEST_CASE("inverse transform examples", "[transform]") {
	const auto round = inverse_transform(transform(ts({3.7, 12.1}), TransformSpec::box_cox(0.0)), TransformSpec::box_cox(0.0));
	CHECK_THAT(round[0], WithinRel(3.7, 1e-10));
	CHECK_THAT(round[1], WithinRel(12.1, 1e-10));
	check_values(inverse_transform(ts({0, 1}), TransformSpec::log()), {1, std::numbers::e});
	check_values(inverse_transform(ts({4, 8}), TransformSpec::box_cox(1.0)), {5, 9});
}

TEST_CASE("transform domain errors", "[transform]") {
	REQUIRE_ERROR_CODE(transform(ts({1, 0}), TransformSpec::log()), ErrorCode::NonPositiveValue);
	REQUIRE_ERROR_CODE(transform(ts({-1}), TransformSpec::box_cox(-0.5)), ErrorCode::NonPositiveValue);
	// 1 + lambda*z <= 0 has no real preimage.
	REQUIRE_ERROR_CODE(inverse_transform(ts({-3}), TransformSpec::box_cox(0.5)), ErrorCode::DomainError);
}

TEST_CASE("log and Box-Cox lambda 0 agree; tiny lambda converges to log", "[transform]") {
	std::vector<double> grid;
	for (double y = 0.5; y <= 100.0; y += 0.25) grid.push_back(y);
	const auto a = transform(ts(grid), TransformSpec::log());
	const auto b = transform(ts(grid), TransformSpec::box_cox(0.0));
	const auto c = transform(ts(grid), TransformSpec::box_cox(1e-8));
	double worst = 0.0;
	for (std::size_t i = 0; i < grid.size(); ++i) {
		CHECK(a[i] == b[i]);
		worst = std::max(worst, std::abs(a[i] - c[i]));
	}
	CHECK(worst < 1e-6);
}

TEST_CASE("transform round trips across lambdas", "[transform][property]") {
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> value(0.01, 5000.0);
	for (double lambda : {-1.0, -0.5, 0.0, 0.3, 0.5, 1.0, 1.7}) {
		std::vector<double> v(200);
		for (double& x : v) x = value(rng);
		const auto back = inverse_transform(transform(ts(v), TransformSpec::box_cox(lambda)), TransformSpec::box_cox(lambda));
		for (std::size_t i = 0; i < v.size(); ++i) CHECK_THAT(back[i], WithinRel(v[i], 1e-10));
	}
}

TEST_CASE("guerrero picks log for multiplicative noise", "[transform]") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> noise(0.0, 0.1);
	std::vector<double> v(700);
	for (std::size_t t = 0; t < v.size(); ++t) v[t] = (50.0 + 3.0 * static_cast<double>(t)) * std::exp(noise(rng));
	CHECK(guerrero_lambda(ts(v)) == 0.0);
	// Constant-spread noise around a trending level is best left alone.
	std::vector<double> w(700);
	for (std::size_t t = 0; t < w.size(); ++t) w[t] = 100.0 + 3.0 * static_cast<double>(t) + 10.0 * noise(rng) * 10.0;
	CHECK(guerrero_lambda(ts(w)) == 1.0);
}

TEST_CASE("difference examples", "[difference]") {
	check_values(difference(ts({1, 2, 4, 7, 11}), {1, 0, 1}), {1, 2, 3, 4});
	check_values(difference(ts({1, 2, 3, 4, 5, 6}), {0, 1, 2}), {2, 2, 2, 2});
	check_values(difference(ts({1, 2, 4, 7}), {2, 0, 1}), {1, 1});
	CHECK(difference(ts({1, 2, 4, 7, 11}), {1, 0, 1}).start() == kStart + 1);
	REQUIRE_ERROR_CODE(difference(ts({1, 2}), {0, 1, 2}), ErrorCode::SeriesTooShort);
	REQUIRE_ERROR_CODE(difference(ts({1, 2, 3}), {3, 0, 1}), ErrorCode::InvalidArgument);
}

TEST_CASE("integrate examples", "[difference]") {
	const std::vector<double> one{1.0}, two{1.0, 2.0};
	check_values(integrate(TimeSeries(kStart + 1, {1, 2, 3, 4}), {1, 0, 1}, one), {1, 2, 4, 7, 11});
	check_values(integrate(TimeSeries(kStart + 2, {2, 2, 2, 2}), {0, 1, 2}, two), {1, 2, 3, 4, 5, 6});
	REQUIRE_ERROR_CODE(integrate(TimeSeries(kStart + 1, {1, 2}), {1, 0, 1}, two), ErrorCode::HeadLengthMismatch);
}

TEST_CASE("difference and integrate are inverse on random walks", "[difference][property]") {
	const auto steps = testing::white_noise(100, 3);
	std::vector<double> walk(100);
	double level = 0.0;
	for (std::size_t i = 0; i < 100; ++i) walk[i] = level += steps[i];
	for (DifferenceSpec spec : {DifferenceSpec{1, 0, 1}, DifferenceSpec{2, 0, 1}, DifferenceSpec{1, 1, 7},
	                            DifferenceSpec{0, 1, 7}, DifferenceSpec{2, 1, 12}}) {
		const auto s = ts(walk);
		const auto d = difference(s, spec);
		const std::span<const double> head(walk.data(), static_cast<std::size_t>(spec.lost()));
		const auto back = integrate(d, spec, head);
		REQUIRE(back.size() == walk.size());
		for (std::size_t i = 0; i < walk.size(); ++i) CHECK_THAT(back[i], WithinAbs(walk[i], 1e-10 * (1 + std::abs(walk[i]))));
		check_values(difference(back, spec), d.values(), 1e-9);
	}
}

TEST_CASE("linear trend differences to a constant", "[difference][property]") {
	std::vector<double> v(50);
	for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3.0 + 0.25 * static_cast<double>(i);
	const auto d = difference(ts(v), {1, 0, 1});
	for (double x : d.values()) CHECK_THAT(x, WithinAbs(0.25, 1e-12));
}

TEST_CASE("acf on simulated processes", "[acf]") {
	const auto a = acf(ts(testing::ar1(10000, 0.6, 42)), 10);
	CHECK(a[0] == 1.0);
	CHECK_THAT(a[1], WithinAbs(0.6, 0.05));
	const auto w = acf(ts(testing::white_noise(10000, 43)), 10);
	for (int k = 1; k <= 10; ++k) CHECK(std::abs(w[static_cast<std::size_t>(k)]) < 0.05);
	for (double r : a) CHECK(std::abs(r) <= 1.0);
	REQUIRE_ERROR_CODE(acf(ts({1, 2, 3}), 3), ErrorCode::LagTooLarge);
}

TEST_CASE("pacf on simulated processes", "[pacf]") {
	const auto s = ts(testing::ar1(10000, 0.6, 44));
	const auto p = pacf(s, 10);
	CHECK_THAT(p[1], WithinAbs(0.6, 0.05));
	CHECK(std::abs(p[2]) < 0.05);
	CHECK(p[1] == acf(s, 10)[1]);
	const auto w = pacf(ts(testing::white_noise(10000, 45)), 10);
	for (int k = 1; k <= 10; ++k) CHECK(std::abs(w[static_cast<std::size_t>(k)]) < 0.05);
	REQUIRE_ERROR_CODE(pacf(ts({1, 2, 3, 4}), 2), ErrorCode::LagTooLarge);
}

TEST_CASE("constant series has zero autocorrelation", "[acf]") {
	const auto s = ts(std::vector<double>(30, 7.0));
	const auto a = acf(s, 5);
	const auto p = pacf(s, 5);
	CHECK(a[0] == 1.0);
	for (int k = 1; k <= 5; ++k) {
		CHECK(a[static_cast<std::size_t>(k)] == 0.0);
		CHECK(p[static_cast<std::size_t>(k)] == 0.0);
	}
}

TEST_CASE("ljung-box matches a direct evaluation", "[diagnostics]") {
	const auto e = testing::white_noise(500, 9);
	const auto r = ljung_box(e, 10, 2);
	const auto a = acf(ts(e), 10);
	double q = 0.0;
	for (int k = 1; k <= 10; ++k) q += a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)] / (500.0 - k);
	q *= 500.0 * 502.0;
	CHECK_THAT(r.statistic, WithinRel(q, 1e-12));
	CHECK(r.dof == 8);
	CHECK(r.p_value > 0.01);
	CHECK(ljung_box(testing::ar1(500, 0.8, 9), 10).p_value < 1e-6);
}

TEST_CASE("series CSV parsing", "[csv]") {
	const auto s = parse_series_csv("date,value\n2017-01-02,5\n2017-01-03,6.5\n", "sales");
	check_values(s, {5, 6.5});
	CHECK(s.start() == kStart);
	CHECK(s.name() == "sales");
	try {
		parse_series_csv("date,value\n2017-01-02,5\n2017-01-04,6\n");
		FAIL("gap accepted");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::MissingDay);
		CHECK(std::string(e.what()).find("2017-01-03") != std::string::npos);
	}
	REQUIRE_ERROR_CODE(parse_series_csv("day,value\n2017-01-02,5\n"), ErrorCode::ParseError);
	REQUIRE_ERROR_CODE(parse_series_csv("date,value\n2017-01-02,abc\n"), ErrorCode::ParseError);
	const auto back = parse_series_csv(series_to_csv(s));
	CHECK(back.values() == s.values());
}

TEST_CASE("series JSON round trip is exact", "[json]") {
	const auto s = TimeSeries(kStart, {0.1, 1.0 / 3.0, 1e300, 12345.678}, "x");
	const auto back = series_from_json(nlohmann::json::parse(to_json(s).dump()));
	CHECK(back == s);
}
