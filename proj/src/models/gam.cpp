#include "eventcast/models/gam.hpp"

#include "eventcast/core/json_io.hpp"
#include "eventcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eventcast::gam {

std::string_view to_string(TermKind kind) {
	switch (kind) {
	case TermKind::CyclicPSpline: return "cyclic_pspline";
	case TermKind::CyclicCubic: return "cyclic_cubic";
	case TermKind::PSpline: return "pspline";
	case TermKind::ThinPlate: return "thinplate_lowrank";
	case TermKind::Linear: return "linear";
	case TermKind::RandomEffect: return "random_effect";
	}
	return "?";
}

TermKind parse_term_kind(std::string_view text) {
	for (auto k : {TermKind::CyclicPSpline, TermKind::CyclicCubic, TermKind::PSpline, TermKind::ThinPlate,
	               TermKind::Linear, TermKind::RandomEffect}) {
		if (to_string(k) == text) return k;
	}
	throw Error(ErrorCode::InvalidArgument, "unknown smooth kind '" + std::string(text) + "'", "kind");
}

namespace {

bool is_cyclic(TermKind k) { return k == TermKind::CyclicPSpline || k == TermKind::CyclicCubic; }
bool is_spline(TermKind k) { return k != TermKind::Linear && k != TermKind::RandomEffect; }

double wrap(double x, double period) {
	double w = std::fmod(x, period);
	if (w < 0.0) w += period;
	return w >= period ? 0.0 : w;
}

std::vector<double> unique_sorted(std::span<const double> x) {
	std::vector<double> u(x.begin(), x.end());
	std::sort(u.begin(), u.end());
	u.erase(std::unique(u.begin(), u.end()), u.end());
	return u;
}

} // namespace

void SmoothTerm::validate() const {
	if (covariate.empty()) throw Error(ErrorCode::InvalidArgument, "smooth term needs a covariate", "covariate");
	if (is_cyclic(kind) && (!period || !(*period > 0.0))) {
		throw Error(ErrorCode::InvalidArgument, "cyclic term on '" + covariate + "' needs a positive period", "period");
	}
	if (is_spline(kind) && n_basis < 3) {
		throw Error(ErrorCode::InvalidArgument, "spline term on '" + covariate + "' needs n_basis >= 3", "n_basis");
	}
	if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) {
		throw Error(ErrorCode::InvalidArgument, "lambda must be a non-negative number", "lambda");
	}
}

// ---------------------------------------------------------------------------
// Bases

namespace {

// Nonzero B-spline values of degree `deg` at x, written into row[i - deg .. i].
void bspline_row(double x, const std::vector<double>& t, int deg, int n_basis, Eigen::MatrixXd& out, Eigen::Index row) {
	x = std::clamp(x, t[static_cast<std::size_t>(deg)], t[static_cast<std::size_t>(n_basis)]);
	int i = deg;
	while (i < n_basis - 1 && x >= t[static_cast<std::size_t>(i + 1)]) ++i;
	std::vector<double> n(static_cast<std::size_t>(deg) + 1, 0.0), left(n.size(), 0.0), right(n.size(), 0.0);
	n[0] = 1.0;
	for (int j = 1; j <= deg; ++j) {
		left[static_cast<std::size_t>(j)] = x - t[static_cast<std::size_t>(i + 1 - j)];
		right[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(i + j)] - x;
		double saved = 0.0;
		for (int r = 0; r < j; ++r) {
			const double temp = n[static_cast<std::size_t>(r)] /
			                    (right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)]);
			n[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
			saved = left[static_cast<std::size_t>(j - r)] * temp;
		}
		n[static_cast<std::size_t>(j)] = saved;
	}
	for (int r = 0; r <= deg; ++r) out(row, i - deg + r) = n[static_cast<std::size_t>(r)];
}

// Uniform cubic B-spline weights (and derivatives in t) for the four active functions.
std::array<double, 4> cubic_weights(double t, int order) {
	const double s = 1.0 - t;
	switch (order) {
	case 0: return {s * s * s / 6.0, (3 * t * t * t - 6 * t * t + 4) / 6.0, (-3 * t * t * t + 3 * t * t + 3 * t + 1) / 6.0, t * t * t / 6.0};
	case 1: return {-s * s / 2.0, 1.5 * t * t - 2 * t, -1.5 * t * t + t + 0.5, t * t / 2.0};
	default: return {s, 3 * t - 2, -3 * t + 1, t};
	}
}

Eigen::MatrixXd cyclic_pspline_rows(const BasisSpec& spec, std::span<const double> x, int order) {
	const int k = spec.n_basis;
	const double h = spec.period / k;
	Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), k);
	for (std::size_t r = 0; r < x.size(); ++r) {
		const double u = wrap(x[r], spec.period) / h;
		int i = static_cast<int>(std::floor(u));
		if (i >= k) i = k - 1;
		const auto w = cubic_weights(u - i, order);
		const double factor = std::pow(h, -order);
		for (int j = 0; j < 4; ++j) {
			const int col = ((i - 3 + j) % k + k) % k;
			out(static_cast<Eigen::Index>(r), col) += factor * w[static_cast<std::size_t>(j)];
		}
	}
	return out;
}

struct CubicMatrices {
	Eigen::MatrixXd b, d;
};

CubicMatrices cyclic_cubic_matrices(const std::vector<double>& knots, double period) {
	const auto k = static_cast<Eigen::Index>(knots.size());
	auto h = [&](Eigen::Index i) {
		const Eigen::Index j = (i % k + k) % k;
		const double next = j + 1 < k ? knots[static_cast<std::size_t>(j + 1)] : period;
		return next - knots[static_cast<std::size_t>(j)];
	};
	CubicMatrices m{Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
	for (Eigen::Index i = 0; i < k; ++i) {
		const Eigen::Index prev = (i - 1 + k) % k, next = (i + 1) % k;
		const double hp = h(i - 1), hi = h(i);
		m.d(i, prev) += 1.0 / hp;
		m.d(i, i) += -1.0 / hp - 1.0 / hi;
		m.d(i, next) += 1.0 / hi;
		m.b(i, prev) += hp / 6.0;
		m.b(i, i) += (hp + hi) / 3.0;
		m.b(i, next) += hi / 6.0;
	}
	return m;
}

Eigen::MatrixXd cyclic_cubic_rows(const BasisSpec& spec, std::span<const double> x, int order) {
	const auto k = static_cast<Eigen::Index>(spec.knots.size());
	const auto& f = spec.transform; // second derivatives at knots = F * beta
	Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), k);
	for (std::size_t r = 0; r < x.size(); ++r) {
		// x == period is kept in the last interval so both ends of the cycle are evaluated.
		const double xv = x[r] == spec.period ? spec.period : wrap(x[r], spec.period);
		Eigen::Index j = static_cast<Eigen::Index>(std::upper_bound(spec.knots.begin(), spec.knots.end(), xv) -
		                                           spec.knots.begin()) - 1;
		j = std::clamp<Eigen::Index>(j, 0, k - 1);
		const double lo = spec.knots[static_cast<std::size_t>(j)];
		const double hi = j + 1 < k ? spec.knots[static_cast<std::size_t>(j + 1)] : spec.period;
		const double h = hi - lo, a = hi - xv, b = xv - lo;
		double am, ap, cm, cp;
		if (order == 0) {
			am = a / h;
			ap = b / h;
			cm = (a * a * a / h - h * a) / 6.0;
			cp = (b * b * b / h - h * b) / 6.0;
		} else if (order == 1) {
			am = -1.0 / h;
			ap = 1.0 / h;
			cm = (-3.0 * a * a / h + h) / 6.0;
			cp = (3.0 * b * b / h - h) / 6.0;
		} else {
			am = ap = 0.0;
			cm = a / h;
			cp = b / h;
		}
		const Eigen::Index jn = (j + 1) % k;
		auto row = out.row(static_cast<Eigen::Index>(r));
		row[j] += am;
		row[jn] += ap;
		row += cm * f.row(j) + cp * f.row(jn);
	}
	return out;
}

double tps_eta(double r) { return r * r * r / 12.0; }

Eigen::MatrixXd null_space_of_rows(const Eigen::MatrixXd& c) {
	// Orthonormal basis of {v : c v = 0}; c has full row rank.
	Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.transpose());
	const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(c.cols(), c.cols());
	return q.rightCols(c.cols() - c.rows());
}

} // namespace

BasisSpec make_basis(const SmoothTerm& term, std::span<const double> x) {
	term.validate();
	if (x.empty()) throw Error(ErrorCode::EmptyData, "no values for '" + term.covariate + "'");
	BasisSpec spec;
	spec.kind = term.kind;
	spec.n_basis = term.n_basis;
	switch (term.kind) {
	case TermKind::CyclicPSpline:
		spec.period = *term.period;
		break;
	case TermKind::CyclicCubic: {
		spec.period = *term.period;
		std::vector<double> wrapped(x.size());
		std::transform(x.begin(), x.end(), wrapped.begin(), [&](double v) { return wrap(v, spec.period); });
		auto u = unique_sorted(wrapped);
		u.erase(std::remove(u.begin(), u.end(), 0.0), u.end());
		const auto k = static_cast<std::size_t>(term.n_basis);
		std::vector<double> knots{0.0};
		if (u.size() >= k - 1) {
			for (std::size_t i = 1; i < k; ++i) knots.push_back(u[(i * u.size()) / k]);
		}
		const bool increasing = knots.size() == k && std::adjacent_find(knots.begin(), knots.end(), std::greater_equal<>()) == knots.end();
		if (!increasing) {
			knots.resize(k);
			for (std::size_t i = 0; i < k; ++i) knots[i] = spec.period * static_cast<double>(i) / static_cast<double>(k);
		}
		spec.knots = knots;
		const auto m = cyclic_cubic_matrices(knots, spec.period);
		spec.transform = m.b.ldlt().solve(m.d);
		break;
	}
	case TermKind::PSpline: {
		const auto u = unique_sorted(x);
		if (u.size() < static_cast<std::size_t>(term.n_basis)) {
			throw Error(ErrorCode::InsufficientUniqueValues, "'" + term.covariate + "' has " + std::to_string(u.size()) +
			                                                     " distinct values, fewer than n_basis " +
			                                                     std::to_string(term.n_basis),
			            "n_basis");
		}
		spec.degree = std::min(3, term.n_basis - 1);
		spec.lower = u.front();
		spec.upper = u.back();
		const int intervals = term.n_basis - spec.degree;
		const double h = (spec.upper - spec.lower) / intervals;
		for (int i = 0; i <= term.n_basis + spec.degree; ++i) spec.knots.push_back(spec.lower + (i - spec.degree) * h);
		break;
	}
	case TermKind::ThinPlate: {
		auto u = unique_sorted(x);
		if (u.size() < static_cast<std::size_t>(term.n_basis)) {
			throw Error(ErrorCode::InsufficientUniqueValues, "'" + term.covariate + "' has " + std::to_string(u.size()) +
			                                                     " distinct values, fewer than n_basis " +
			                                                     std::to_string(term.n_basis),
			            "n_basis");
		}
		constexpr std::size_t max_centers = 100;
		if (u.size() > max_centers) {
			std::vector<double> thinned;
			for (std::size_t i = 0; i < max_centers; ++i) thinned.push_back(u[i * (u.size() - 1) / (max_centers - 1)]);
			u = std::move(thinned);
		}
		spec.centers = u;
		spec.lower = u.front();
		spec.upper = u.back();
		const auto nc = static_cast<Eigen::Index>(u.size());
		Eigen::MatrixXd e(nc, nc), t(nc, 2);
		for (Eigen::Index i = 0; i < nc; ++i) {
			t(i, 0) = 1.0;
			t(i, 1) = u[static_cast<std::size_t>(i)];
			for (Eigen::Index j = 0; j < nc; ++j) e(i, j) = tps_eta(std::abs(u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)]));
		}
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e);
		std::vector<Eigen::Index> order(static_cast<std::size_t>(nc));
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
			return std::abs(eig.eigenvalues()[a]) > std::abs(eig.eigenvalues()[b]);
		});
		const Eigen::Index k = term.n_basis;
		Eigen::MatrixXd uk(nc, k);
		Eigen::VectorXd dk(k);
		for (Eigen::Index i = 0; i < k; ++i) {
			uk.col(i) = eig.eigenvectors().col(order[static_cast<std::size_t>(i)]);
			dk[i] = eig.eigenvalues()[order[static_cast<std::size_t>(i)]];
		}
		const Eigen::MatrixXd z = null_space_of_rows(t.transpose() * uk);
		spec.transform = uk * z;
		const Eigen::MatrixXd p = z.transpose() * dk.asDiagonal() * z;
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(0.5 * (p + p.transpose()));
		spec.tp_penalty = pe.eigenvectors() * pe.eigenvalues().cwiseMax(0.0).asDiagonal() * pe.eigenvectors().transpose();
		break;
	}
	case TermKind::Linear:
		spec.n_basis = 1;
		spec.center = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
		break;
	case TermKind::RandomEffect:
		spec.levels = unique_sorted(x);
		spec.n_basis = static_cast<int>(spec.levels.size());
		break;
	}
	return spec;
}

Eigen::MatrixXd evaluate_basis(const BasisSpec& spec, std::span<const double> x) {
	const auto n = static_cast<Eigen::Index>(x.size());
	switch (spec.kind) {
	case TermKind::CyclicPSpline: return cyclic_pspline_rows(spec, x, 0);
	case TermKind::CyclicCubic: return cyclic_cubic_rows(spec, x, 0);
	case TermKind::PSpline: {
		Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, spec.n_basis);
		for (Eigen::Index i = 0; i < n; ++i) bspline_row(x[static_cast<std::size_t>(i)], spec.knots, spec.degree, spec.n_basis, out, i);
		return out;
	}
	case TermKind::ThinPlate: {
		const auto nc = static_cast<Eigen::Index>(spec.centers.size());
		Eigen::MatrixXd e(n, nc);
		for (Eigen::Index i = 0; i < n; ++i) {
			for (Eigen::Index j = 0; j < nc; ++j) e(i, j) = tps_eta(std::abs(x[static_cast<std::size_t>(i)] - spec.centers[static_cast<std::size_t>(j)]));
		}
		Eigen::MatrixXd out(n, spec.n_basis);
		out.leftCols(spec.n_basis - 2) = e * spec.transform;
		out.col(spec.n_basis - 2).setOnes();
		for (Eigen::Index i = 0; i < n; ++i) out(i, spec.n_basis - 1) = x[static_cast<std::size_t>(i)];
		return out;
	}
	case TermKind::Linear: {
		Eigen::MatrixXd out(n, 1);
		for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = x[static_cast<std::size_t>(i)] - spec.center;
		return out;
	}
	case TermKind::RandomEffect: {
		Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, spec.n_basis);
		for (Eigen::Index i = 0; i < n; ++i) {
			const auto it = std::lower_bound(spec.levels.begin(), spec.levels.end(), x[static_cast<std::size_t>(i)]);
			if (it != spec.levels.end() && *it == x[static_cast<std::size_t>(i)]) out(i, it - spec.levels.begin()) = 1.0;
		}
		return out;
	}
	}
	return {};
}

Eigen::MatrixXd build_basis(const SmoothTerm& term, std::span<const double> x) {
	return evaluate_basis(make_basis(term, x), x);
}

Eigen::MatrixXd basis_derivative(const BasisSpec& spec, std::span<const double> x, int order) {
	if (order < 1 || order > 2) throw Error(ErrorCode::InvalidArgument, "derivative order must be 1 or 2", "order");
	if (spec.kind == TermKind::CyclicPSpline) return cyclic_pspline_rows(spec, x, order);
	if (spec.kind == TermKind::CyclicCubic) return cyclic_cubic_rows(spec, x, order);
	throw Error(ErrorCode::InvalidArgument, "derivatives are available for cyclic bases only", "kind");
}

Eigen::MatrixXd difference_matrix(int n, int order) {
	Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
	for (int k = 0; k < order; ++k) d = (d.bottomRows(d.rows() - 1) - d.topRows(d.rows() - 1)).eval();
	return d;
}

Eigen::MatrixXd penalty_matrix(const BasisSpec& spec) {
	const int k = spec.n_basis;
	switch (spec.kind) {
	case TermKind::CyclicPSpline: {
		Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
		for (int r = 0; r < k; ++r) {
			d(r, (r + k - 1) % k) += 1.0;
			d(r, r) += -2.0;
			d(r, (r + 1) % k) += 1.0;
		}
		return d.transpose() * d;
	}
	case TermKind::CyclicCubic: {
		const auto m = cyclic_cubic_matrices(spec.knots, spec.period);
		const Eigen::MatrixXd s = m.d.transpose() * m.b.ldlt().solve(m.d);
		return 0.5 * (s + s.transpose());
	}
	case TermKind::PSpline: {
		const auto d = difference_matrix(k, 2);
		return d.transpose() * d;
	}
	case TermKind::ThinPlate: {
		Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
		s.topLeftCorner(k - 2, k - 2) = spec.tp_penalty;
		return s;
	}
	case TermKind::Linear: return Eigen::MatrixXd::Zero(1, 1);
	case TermKind::RandomEffect: return Eigen::MatrixXd::Identity(k, k);
	}
	return {};
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

std::vector<double> column_values(const DesignMatrix& data, const std::string& name) {
	const Eigen::VectorXd c = data.column(name);
	return {c.data(), c.data() + c.size()};
}

struct Block {
	Eigen::Index offset = 0;
	Eigen::Index size = 0;
	Eigen::MatrixXd penalty; // constrained and scaled
	bool penalized = false;
};

struct Solution {
	Eigen::VectorXd beta;
	double rss = 0.0;
	double trace = 0.0;
	std::vector<double> edf;
	double gcv = std::numeric_limits<double>::infinity();
	bool ok = false;
};

struct System {
	Eigen::MatrixXd x;
	Eigen::MatrixXd xtx;
	Eigen::VectorXd xty;
	Eigen::VectorXd y;
	std::vector<Block> blocks;

	Solution solve(const std::vector<double>& lambdas) const {
		Eigen::MatrixXd a = xtx;
		for (std::size_t i = 0; i < blocks.size(); ++i) {
			const auto& b = blocks[i];
			if (b.penalized && lambdas[i] > 0.0) a.block(b.offset, b.offset, b.size, b.size) += lambdas[i] * b.penalty;
		}
		Solution s;
		Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
		if (ldlt.info() != Eigen::Success) return s;
		const Eigen::VectorXd d = ldlt.vectorD();
		const double dmax = d.cwiseAbs().maxCoeff();
		if (!(d.minCoeff() > 1e-13 * dmax)) return s;
		s.beta = ldlt.solve(xty);
		const Eigen::MatrixXd influence = ldlt.solve(xtx);
		s.trace = influence.trace();
		for (const auto& b : blocks) s.edf.push_back(influence.diagonal().segment(b.offset, b.size).sum());
		s.rss = (y - x * s.beta).squaredNorm();
		const double n = static_cast<double>(y.size());
		const double denom = n - s.trace;
		s.gcv = denom > 1e-9 ? n * s.rss / (denom * denom) : std::numeric_limits<double>::infinity();
		s.ok = std::isfinite(s.gcv) || std::isfinite(s.rss);
		return s;
	}
};

} // namespace

double FittedGam::total_edf() const {
	double e = 1.0;
	for (const auto& t : terms) e += t.edf;
	return e;
}

FittedGam fit_gam(std::span<const double> y, const DesignMatrix& data, const std::vector<SmoothTerm>& terms,
                  const FitOptions& options) {
	const auto n = static_cast<Eigen::Index>(y.size());
	if (n == 0) throw Error(ErrorCode::EmptyData, "no observations");
	if (static_cast<Eigen::Index>(data.rows()) != n) {
		throw Error(ErrorCode::LengthMismatch, "data has " + std::to_string(data.rows()) + " rows, y has " +
		                                           std::to_string(n));
	}
	FittedGam model;
	model.n = y.size();

	std::vector<Eigen::MatrixXd> blocks_x;
	System sys;
	Eigen::Index p = 1;
	for (const auto& term : terms) {
		FittedTerm ft;
		ft.term = term;
		const auto x = column_values(data, term.covariate);
		ft.basis = make_basis(term, x);
		const Eigen::MatrixXd raw = evaluate_basis(ft.basis, x);
		const Eigen::VectorXd sums = raw.colwise().sum().transpose();
		if (sums.norm() <= 1e-10 * static_cast<double>(n) * std::max(1.0, raw.cwiseAbs().maxCoeff())) {
			ft.constraint = Eigen::MatrixXd::Identity(raw.cols(), raw.cols());
		} else {
			ft.constraint = null_space_of_rows(sums.transpose());
		}
		Eigen::MatrixXd xb = raw * ft.constraint;
		Block block;
		block.offset = p;
		block.size = xb.cols();
		block.penalty = ft.constraint.transpose() * penalty_matrix(ft.basis) * ft.constraint;
		const double pn = block.penalty.norm();
		block.penalized = pn > 0.0;
		if (block.penalized) {
			ft.penalty_scale = (xb.transpose() * xb).norm() / pn;
			if (!(ft.penalty_scale > 0.0)) ft.penalty_scale = 1.0;
			block.penalty *= ft.penalty_scale;
		}
		p += block.size;
		sys.blocks.push_back(std::move(block));
		blocks_x.push_back(std::move(xb));
		model.terms.push_back(std::move(ft));
	}
	if (n < p) {
		throw Error(ErrorCode::TooFewRows, std::to_string(n) + " rows cannot support " + std::to_string(p) + " coefficients");
	}
	sys.x.resize(n, p);
	sys.x.col(0).setOnes();
	for (std::size_t i = 0; i < blocks_x.size(); ++i) sys.x.middleCols(sys.blocks[i].offset, sys.blocks[i].size) = blocks_x[i];
	sys.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
	sys.xtx = sys.x.transpose() * sys.x;
	sys.xty = sys.x.transpose() * sys.y;

	std::vector<double> grid(static_cast<std::size_t>(options.grid_points));
	for (int i = 0; i < options.grid_points; ++i) {
		const double f = options.grid_points == 1 ? 0.0 : static_cast<double>(i) / (options.grid_points - 1);
		grid[static_cast<std::size_t>(i)] = std::exp(std::log(options.grid_min) + f * (std::log(options.grid_max) - std::log(options.grid_min)));
	}

	std::vector<double> lambdas(terms.size(), 0.0);
	std::vector<std::size_t> automatic;
	std::vector<std::size_t> chosen(terms.size(), 0);
	for (std::size_t i = 0; i < terms.size(); ++i) {
		if (!sys.blocks[i].penalized) continue;
		if (terms[i].lambda) {
			lambdas[i] = *terms[i].lambda;
		} else {
			lambdas[i] = 1.0;
			automatic.push_back(i);
		}
	}

	for (int sweep = 0; sweep < options.sweeps && !automatic.empty(); ++sweep) {
		for (std::size_t i : automatic) {
			double best = std::numeric_limits<double>::infinity();
			std::size_t best_index = chosen[i];
			for (std::size_t g = 0; g < grid.size(); ++g) {
				lambdas[i] = grid[g];
				const auto s = sys.solve(lambdas);
				if (s.ok && s.gcv < best) {
					best = s.gcv;
					best_index = g;
				}
			}
			if (!std::isfinite(best)) {
				throw Error(ErrorCode::SingularSystem, "no smoothing parameter for '" + terms[i].covariate +
				                                           "' gives a solvable system");
			}
			chosen[i] = best_index;
			lambdas[i] = grid[best_index];
		}
	}
	for (std::size_t i : automatic) {
		if (chosen[i] == 0 || chosen[i] + 1 == grid.size()) {
			model.warnings.push_back("GridExhausted: smoothing parameter for '" + terms[i].covariate +
			                         "' at the edge of the search grid");
		}
	}

	const auto sol = sys.solve(lambdas);
	if (!sol.ok) throw Error(ErrorCode::SingularSystem, "penalized normal equations are singular");
	model.intercept = sol.beta[0];
	for (std::size_t i = 0; i < model.terms.size(); ++i) {
		auto& t = model.terms[i];
		const auto& b = sys.blocks[i];
		t.lambda = lambdas[i];
		t.coefficients = t.constraint * sol.beta.segment(b.offset, b.size);
		t.edf = sol.edf[i];
	}
	model.rss = sol.rss;
	model.gcv = sol.gcv;
	const double dof = static_cast<double>(n) - sol.trace;
	model.sigma2 = dof > 0.0 ? sol.rss / dof : 0.0;
	return model;
}

Eigen::VectorXd term_contribution(const FittedGam& model, std::size_t term, const DesignMatrix& data) {
	const auto& t = model.terms.at(term);
	const auto x = column_values(data, t.term.covariate);
	return evaluate_basis(t.basis, x) * t.coefficients;
}

Eigen::VectorXd predict_gam(const FittedGam& model, const DesignMatrix& data) {
	Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(data.rows()), model.intercept);
	for (std::size_t i = 0; i < model.terms.size(); ++i) out += term_contribution(model, i, data);
	return out;
}

std::vector<SmoothTerm> default_game_formula(const std::vector<std::string>& columns) {
	std::vector<SmoothTerm> terms{{"day_of_week", TermKind::CyclicPSpline, 7, 7.0, std::nullopt},
	                              {"month", TermKind::CyclicPSpline, 12, 12.0, std::nullopt}};
	for (const auto& c : columns) {
		if (c == "day_of_week" || c == "month" || c.starts_with("dow_") || c.starts_with("month_")) continue;
		if (c == "gacha") {
			terms.push_back({c, TermKind::PSpline, 4, std::nullopt, std::nullopt});
		} else if (c == "temperature") {
			terms.push_back({c, TermKind::CyclicCubic, 8, 365.25, std::nullopt});
		} else if (c == "marketing" || c == "promotion" || c == "t") {
			terms.push_back({c, TermKind::Linear, 1, std::nullopt, std::nullopt});
		} else if (c == "day_of_year") {
			terms.push_back({c, TermKind::ThinPlate, 10, std::nullopt, std::nullopt});
		} else {
			terms.push_back({c, TermKind::ThinPlate, 5, std::nullopt, std::nullopt});
		}
	}
	return terms;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const FittedGam& model) {
	nlohmann::json terms = nlohmann::json::array();
	for (const auto& t : model.terms) {
		const auto& b = t.basis;
		terms.push_back({{"covariate", t.term.covariate},
		                 {"kind", std::string(to_string(t.term.kind))},
		                 {"n_basis", t.term.n_basis},
		                 {"period", t.term.period ? nlohmann::json(*t.term.period) : nlohmann::json(nullptr)},
		                 {"requested_lambda", t.term.lambda ? nlohmann::json(*t.term.lambda) : nlohmann::json("auto")},
		                 {"basis",
		                  {{"n_basis", b.n_basis},
		                   {"period", b.period},
		                   {"degree", b.degree},
		                   {"knots", b.knots},
		                   {"centers", b.centers},
		                   {"transform", matrix_to_json(b.transform)},
		                   {"levels", b.levels},
		                   {"center", b.center},
		                   {"lower", b.lower},
		                   {"upper", b.upper},
		                   {"tp_penalty", matrix_to_json(b.tp_penalty)}}},
		                 {"constraint", matrix_to_json(t.constraint)},
		                 {"penalty_scale", t.penalty_scale},
		                 {"lambda", t.lambda},
		                 {"coefficients", vector_to_json(t.coefficients)},
		                 {"edf", t.edf}});
	}
	return {{"format", "eventcast.gam"},
	        {"version", 1},
	        {"intercept", model.intercept},
	        {"terms", terms},
	        {"sigma2", model.sigma2},
	        {"gcv", model.gcv},
	        {"rss", model.rss},
	        {"n", model.n},
	        {"warnings", model.warnings}};
}

FittedGam gam_from_json(const nlohmann::json& j) {
	check_format(j, "eventcast.gam", 1);
	FittedGam m;
	m.intercept = j.at("intercept");
	for (const auto& jt : j.at("terms")) {
		FittedTerm t;
		t.term.covariate = jt.at("covariate");
		t.term.kind = parse_term_kind(jt.at("kind").get<std::string>());
		t.term.n_basis = jt.at("n_basis");
		if (!jt.at("period").is_null()) t.term.period = jt.at("period").get<double>();
		if (jt.at("requested_lambda").is_number()) t.term.lambda = jt.at("requested_lambda").get<double>();
		const auto& b = jt.at("basis");
		t.basis.kind = t.term.kind;
		t.basis.n_basis = b.at("n_basis");
		t.basis.period = b.at("period");
		t.basis.degree = b.at("degree");
		t.basis.knots = b.at("knots").get<std::vector<double>>();
		t.basis.centers = b.at("centers").get<std::vector<double>>();
		t.basis.transform = matrix_from_json(b.at("transform"));
		t.basis.levels = b.at("levels").get<std::vector<double>>();
		t.basis.center = b.at("center");
		t.basis.lower = b.at("lower");
		t.basis.upper = b.at("upper");
		t.basis.tp_penalty = matrix_from_json(b.at("tp_penalty"));
		t.constraint = matrix_from_json(jt.at("constraint"));
		t.penalty_scale = jt.at("penalty_scale");
		t.lambda = jt.at("lambda");
		t.coefficients = vector_from_json(jt.at("coefficients"));
		t.edf = jt.at("edf");
		if (t.coefficients.size() != t.basis.n_basis) throw Error(ErrorCode::ParseError, "coefficient count mismatch");
		m.terms.push_back(std::move(t));
	}
	m.sigma2 = j.at("sigma2");
	m.gcv = j.at("gcv");
	m.rss = j.at("rss");
	m.n = j.at("n");
	m.warnings = j.at("warnings").get<std::vector<std::string>>();
	return m;
}

} // namespace eventcast::gam
