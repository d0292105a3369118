#include "netinfer/estimators.hpp"

#include "netinfer/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <charconv>

namespace netinfer {

namespace {

constexpr double kMaxConditionNumber = 1e12;

// A set of equally long columns, each with the alphabet size of its subsystem
// (zero for real-valued data).
struct Columns {
    std::vector<std::span<const double>> data;
    std::vector<int> alphabet;

    void add(std::span<const double> col, int r) {
        data.push_back(col);
        alphabet.push_back(r);
    }
    std::size_t dims() const { return data.size(); }
};

void append(Columns& cols, const Variable& v, const EmbeddedView& view) {
    const int r = view.is_discrete() ? view.alphabet(v.subsystem) : 0;
    if (v.role == Variable::Role::Present) {
        cols.add(view.present(v.subsystem), r);
    } else {
        for (std::size_t k = 0; k < view.kappa(v.subsystem); ++k) {
            cols.add(view.history(v.subsystem, k), r);
        }
    }
}

// Dense integer label per row for the joint symbol of `cols`. Labels are
// mixed-radix codes while they fit in 62 bits and are re-ranked otherwise.
std::vector<std::uint64_t> encode_rows(const Columns& cols, std::size_t rows) {
    std::vector<std::uint64_t> code(rows, 0);
    std::uint64_t range = 1;
    for (std::size_t c = 0; c < cols.dims(); ++c) {
        const auto r = static_cast<std::uint64_t>(cols.alphabet[c]);
        if (range > (std::uint64_t{1} << 62) / r) {
            std::vector<std::uint64_t> sorted = code;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (auto& x : code) {
                x = static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
            }
            range = sorted.size();
        }
        const auto col = cols.data[c];
        for (std::size_t t = 0; t < rows; ++t) {
            code[t] = code[t] * r + static_cast<std::uint64_t>(col[t]);
        }
        range *= r;
    }
    return code;
}

double discrete_entropy(const Columns& z, const Columns& w, std::size_t rows) {
    const auto zc = encode_rows(z, rows);
    const auto wc = encode_rows(w, rows);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        pairs[t] = {wc[t], zc[t]};
    }
    std::sort(pairs.begin(), pairs.end());

    // -sum_{z,w} p(z,w) log2 p(z|w), grouped by w then by z.
    const double n = static_cast<double>(rows);
    double h = 0.0;
    std::size_t i = 0;
    while (i < rows) {
        std::size_t j = i;
        while (j < rows && pairs[j].first == pairs[i].first) {
            ++j;
        }
        const double count_w = static_cast<double>(j - i);
        std::size_t k = i;
        while (k < j) {
            std::size_t l = k;
            while (l < j && pairs[l].second == pairs[k].second) {
                ++l;
            }
            const double count_zw = static_cast<double>(l - k);
            h -= (count_zw / n) * std::log2(count_zw / count_w);
            k = l;
        }
        i = j;
    }
    return h;
}

double log2_det_checked(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) {
        throw NumericError("degenerate covariance (condition number exceeds 1e12)");
    }
    double log_det = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        log_det += std::log2(ev[k]);
    }
    return log_det;
}

double gaussian_entropy(const Columns& z, const Columns& w, std::size_t rows) {
    const auto dz = static_cast<Eigen::Index>(z.dims());
    const auto dw = static_cast<Eigen::Index>(w.dims());
    const Eigen::Index d = dz + dw;
    if (rows < static_cast<std::size_t>(d) + 2) {
        throw NumericError("degenerate covariance (too few rows for dimension)");
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const auto col = c < dz ? z.data[static_cast<std::size_t>(c)] : w.data[static_cast<std::size_t>(c - dz)];
        x.col(c) = Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(rows));
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(rows - 1);

    Eigen::MatrixXd schur = cov.topLeftCorner(dz, dz);
    if (dw > 0) {
        const Eigen::MatrixXd sww = cov.bottomRightCorner(dw, dw);
        log2_det_checked(sww);
        const Eigen::MatrixXd szw = cov.topRightCorner(dz, dw);
        schur -= szw * sww.ldlt().solve(szw.transpose());
    }
    const double log_det = log2_det_checked(schur);
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    return 0.5 * (static_cast<double>(dz) * std::log2(two_pi_e) + log_det);
}

double box_kernel_entropy(const Columns& z, const Columns& w, std::size_t rows, double width) {
    // Neighbour search in a window of the first coordinate of W (or Z when W is
    // empty), sorted once per call.
    const bool key_from_w = w.dims() > 0;
    const auto key = key_from_w ? w.data.front() : z.data.front();
    std::vector<std::size_t> order(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        order[t] = t;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    std::vector<double> sorted_key(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        sorted_key[k] = key[order[k]];
    }

    auto within = [&](const Columns& cols, std::size_t a, std::size_t b) {
        for (const auto col : cols.data) {
            if (std::abs(col[a] - col[b]) > width) {
                return false;
            }
        }
        return true;
    };

    double sum = 0.0;
    for (std::size_t t = 0; t < rows; ++t) {
        const double k0 = key[t];
        const auto lo = std::lower_bound(sorted_key.begin(), sorted_key.end(), k0 - width) - sorted_key.begin();
        const auto hi = std::upper_bound(sorted_key.begin(), sorted_key.end(), k0 + width) - sorted_key.begin();
        double count_w = key_from_w ? 0.0 : static_cast<double>(rows);
        double count_zw = 0.0;
        for (auto k = lo; k < hi; ++k) {
            const std::size_t s = order[static_cast<std::size_t>(k)];
            if (key_from_w) {
                if (!within(w, s, t)) {
                    continue;
                }
                count_w += 1.0;
            } else if (!within(w, s, t)) {
                continue;
            }
            if (within(z, s, t)) {
                count_zw += 1.0;
            }
        }
        sum -= std::log2(count_zw / count_w);
    }
    return sum / static_cast<double>(rows) + static_cast<double>(z.dims()) * std::log2(2.0 * width);
}

double entropy_of(const Columns& z, const Columns& w, std::size_t rows, const EstimatorKind& kind) {
    if (rows == 0) {
        throw ValidationError("conditional entropy of an empty view");
    }
    if (z.dims() == 0) {
        return 0.0;
    }
    switch (kind.type) {
        case EstimatorKind::Type::DiscretePlugin:
            return discrete_entropy(z, w, rows);
        case EstimatorKind::Type::LinearGaussian:
            return gaussian_entropy(z, w, rows);
        case EstimatorKind::Type::BoxKernel:
            return box_kernel_entropy(z, w, rows, kind.width);
    }
    return 0.0;
}

void check_sources(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view) {
    if (!view.contains(dest)) {
        throw ValidationError("destination " + std::to_string(dest) + " is not embedded");
    }
    for (std::size_t k = 0; k < sources.size(); ++k) {
        if (sources[k] == dest) {
            throw ValidationError("destination " + std::to_string(dest) + " listed among its own sources");
        }
        if (!view.contains(sources[k])) {
            throw ValidationError("source " + std::to_string(sources[k]) + " is not embedded");
        }
        for (std::size_t l = 0; l < k; ++l) {
            if (sources[l] == sources[k]) {
                throw ValidationError("duplicate source " + std::to_string(sources[k]));
            }
        }
    }
}

}  // namespace

EstimatorKind EstimatorKind::box_kernel(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw ValidationError("box-kernel width must be a positive finite number");
    }
    return {Type::BoxKernel, width};
}

std::string EstimatorKind::name() const {
    switch (type) {
        case Type::DiscretePlugin:
            return "discrete-plugin";
        case Type::LinearGaussian:
            return "linear-gaussian";
        case Type::BoxKernel: {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, width);
            return "box-kernel(" + std::string(buf, res.ptr) + ")";
        }
    }
    return "unknown";
}

void EstimatorKind::check_compatible(const EmbeddedView& view) const {
    if (type == Type::DiscretePlugin && !view.is_discrete()) {
        throw ValidationError("discrete-plugin estimator requires discretized data");
    }
    if (type != Type::DiscretePlugin && view.is_discrete()) {
        throw ValidationError(name() + " estimator requires real-valued data");
    }
    if (type == Type::BoxKernel && !(width > 0.0)) {
        throw ValidationError("box-kernel width must be positive");
    }
}

EstimatorKind parse_estimator(const std::string& text, double width) {
    if (text == "discrete" || text == "discrete-plugin" || text == "plugin") {
        return EstimatorKind::discrete_plugin();
    }
    if (text == "linear-gaussian" || text == "gaussian") {
        return EstimatorKind::linear_gaussian();
    }
    if (text == "box-kernel" || text == "kernel") {
        return EstimatorKind::box_kernel(width);
    }
    if (text.rfind("box-kernel(", 0) == 0 && text.back() == ')') {
        return EstimatorKind::box_kernel(std::stod(text.substr(11, text.size() - 12)));
    }
    throw ValidationError("unknown estimator '" + text + "'");
}

EntropyResult conditional_entropy(std::span<const Variable> target, std::span<const Variable> conditioners,
                                  const EmbeddedView& view, const EstimatorKind& kind) {
    kind.check_compatible(view);
    Columns z;
    Columns w;
    for (const auto& v : target) {
        append(z, v, view);
    }
    for (const auto& v : conditioners) {
        append(w, v, view);
    }
    return {entropy_of(z, w, view.rows(), kind), view.rows(), kind};
}

double self_conditional_entropy(std::size_t dest, const EmbeddedView& view, const EstimatorKind& kind) {
    const Variable target[] = {Variable::present(dest)};
    const Variable cond[] = {Variable::history(dest)};
    return conditional_entropy(target, cond, view, kind).value;
}

double source_conditional_entropy(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view,
                                  const EstimatorKind& kind, std::span<const std::size_t> source_rows) {
    kind.check_compatible(view);
    check_sources(dest, sources, view);
    const std::size_t rows = view.rows();
    if (!source_rows.empty() && source_rows.size() != rows) {
        throw ValidationError("source row order has " + std::to_string(source_rows.size()) + " entries, view has " +
                              std::to_string(rows) + " rows");
    }
    Columns z;
    Columns w;
    append(z, Variable::present(dest), view);
    append(w, Variable::history(dest), view);

    std::vector<std::vector<double>> reordered;
    for (const auto s : sources) {
        const int r = view.is_discrete() ? view.alphabet(s) : 0;
        for (std::size_t k = 0; k < view.kappa(s); ++k) {
            const auto col = view.history(s, k);
            if (source_rows.empty()) {
                w.add(col, r);
                continue;
            }
            auto& copy = reordered.emplace_back(rows);
            for (std::size_t t = 0; t < rows; ++t) {
                copy[t] = col[source_rows[t]];
            }
        }
    }
    if (!source_rows.empty()) {
        std::size_t c = 0;
        for (const auto s : sources) {
            const int r = view.is_discrete() ? view.alphabet(s) : 0;
            for (std::size_t k = 0; k < view.kappa(s); ++k) {
                w.add(reordered[c++], r);
            }
        }
    }
    return entropy_of(z, w, rows, kind);
}

double collective_transfer_entropy(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view,
                                   const EstimatorKind& kind) {
    return collective_transfer_entropy(dest, sources, view, kind, {});
}

double collective_transfer_entropy(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view,
                                   const EstimatorKind& kind, std::span<const std::size_t> source_rows) {
    check_sources(dest, sources, view);
    if (sources.empty()) {
        return 0.0;
    }
    return self_conditional_entropy(dest, view, kind) -
           source_conditional_entropy(dest, sources, view, kind, source_rows);
}

double stochastic_interaction(const EmbeddedView& view, const EstimatorKind& kind) {
    if (!view.covers_all()) {
        throw ValidationError("stochastic interaction needs a view over every subsystem");
    }
    const auto m = view.total_subsystems();
    if (m == 1) {
        return 0.0;
    }
    std::vector<Variable> target;
    std::vector<Variable> cond;
    double self_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        target.push_back(Variable::present(i));
        cond.push_back(Variable::history(i));
        self_sum += self_conditional_entropy(i, view, kind);
    }
    return self_sum - conditional_entropy(target, cond, view, kind).value;
}

namespace {

// Per-row plug-in estimate of E[log p(x'|h) - sum_i log p(x'_i | own_i, pa_i)],
// counted directly rather than through the entropy decomposition.
double discrete_kl_divergence(const Dag& graph, const EmbeddedView& view) {
    if (!view.covers_all()) {
        throw ValidationError("kl divergence needs a view over every subsystem");
    }
    const std::size_t m = graph.size();
    const std::size_t n = view.rows();
    using Key = std::vector<double>;
    auto history_into = [&](Key& key, std::size_t i, std::size_t t) {
        for (std::size_t k = 0; k < view.kappa(i); ++k) {
            key.push_back(view.history(i, k)[t]);
        }
    };
    std::vector<Key> full(n);
    std::vector<std::vector<Key>> local(m, std::vector<Key>(n));
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            history_into(full[t], i, t);
            history_into(local[i][t], i, t);
            for (const auto p : graph.parents(i)) {
                history_into(local[i][t], p, t);
            }
        }
    }
    auto log_conditional = [&](const std::vector<Key>& cond, auto present_of) {
        std::map<Key, std::size_t> c_cond;
        std::map<Key, std::size_t> c_joint;
        std::vector<Key> joint(n);
        for (std::size_t t = 0; t < n; ++t) {
            joint[t] = cond[t];
            present_of(joint[t], t);
            ++c_cond[cond[t]];
            ++c_joint[joint[t]];
        }
        std::vector<double> out(n);
        for (std::size_t t = 0; t < n; ++t) {
            out[t] = std::log2(static_cast<double>(c_joint[joint[t]]) / static_cast<double>(c_cond[cond[t]]));
        }
        return out;
    };
    std::vector<double> row = log_conditional(full, [&](Key& k, std::size_t t) {
        for (std::size_t i = 0; i < m; ++i) {
            k.push_back(view.present(i)[t]);
        }
    });
    for (std::size_t i = 0; i < m; ++i) {
        const auto li = log_conditional(local[i], [&](Key& k, std::size_t t) { k.push_back(view.present(i)[t]); });
        for (std::size_t t = 0; t < n; ++t) {
            row[t] -= li[t];
        }
    }
    double sum = 0.0;
    for (const double v : row) {
        sum += v;
    }
    return sum / static_cast<double>(n);
}

}  // namespace

double kl_divergence(const Dag& graph, const EmbeddedView& view, const EstimatorKind& kind) {
    if (graph.size() != view.total_subsystems()) {
        throw ValidationError("graph has " + std::to_string(graph.size()) + " vertices, data has " +
                              std::to_string(view.total_subsystems()) + " subsystems");
    }
    if (kind.type == EstimatorKind::Type::DiscretePlugin) {
        return discrete_kl_divergence(graph, view);
    }
    double te_sum = 0.0;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        te_sum += collective_transfer_entropy(i, graph.parents(i), view, kind);
    }
    return stochastic_interaction(view, kind) - te_sum;
}

}  // namespace netinfer
