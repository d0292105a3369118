#include "netinfer/timeseries.hpp"

#include "netinfer/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace netinfer {

EmbeddedView embed_columns(const std::vector<std::vector<double>>& columns, const std::vector<std::string>& names,
                           const std::vector<int>& alphabets, const EmbeddingSpec& spec,
                           std::span<const std::size_t> subsystems, bool discrete);

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

std::vector<std::size_t> all_indices(std::size_t m) {
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) {
        idx[i] = i;
    }
    return idx;
}

}  // namespace

TimeSeriesSet::TimeSeriesSet(std::vector<std::string> names, std::vector<std::vector<double>> series)
    : names_(std::move(names)), series_(std::move(series)) {
    if (series_.empty()) {
        throw ValidationError("time series set needs at least one subsystem");
    }
    if (names_.size() != series_.size()) {
        throw ValidationError("time series set: " + std::to_string(names_.size()) + " names for " +
                              std::to_string(series_.size()) + " series");
    }
    const std::size_t n = series_.front().size();
    if (n < 2) {
        throw ValidationError("time series set needs at least 2 samples");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < series_.size(); ++i) {
        if (!seen.insert(names_[i]).second) {
            throw ValidationError("duplicate subsystem name '" + names_[i] + "'");
        }
        if (series_[i].size() != n) {
            throw ValidationError("series '" + names_[i] + "' has length " + std::to_string(series_[i].size()) +
                                  ", expected " + std::to_string(n));
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (!std::isfinite(series_[i][t])) {
                throw ValidationError("series '" + names_[i] + "' has a non-finite value at sample " +
                                      std::to_string(t));
            }
        }
    }
}

std::size_t TimeSeriesSet::index_of(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw ValidationError("no subsystem named '" + name + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

EmbeddingSpec EmbeddingSpec::uniform(std::size_t subsystems, std::size_t tau, std::size_t kappa) {
    return EmbeddingSpec{std::vector<std::size_t>(subsystems, tau), std::vector<std::size_t>(subsystems, kappa)};
}

void EmbeddingSpec::validate(std::size_t subsystems, std::size_t n) const {
    if (tau.size() != subsystems || kappa.size() != subsystems) {
        throw ValidationError("embedding spec covers " + std::to_string(tau.size()) + "/" +
                              std::to_string(kappa.size()) + " subsystems, data has " +
                              std::to_string(subsystems));
    }
    for (std::size_t i = 0; i < subsystems; ++i) {
        if (tau[i] < 1 || kappa[i] < 1) {
            throw ValidationError("embedding of subsystem " + std::to_string(i) + ": tau and kappa must be >= 1");
        }
        if (n < 2 || depth(i) >= n - 1) {
            throw ValidationError("embedding exceeds data length for subsystem " + std::to_string(i) +
                                  " ((kappa-1)*tau = " + std::to_string(depth(i)) + ", N = " + std::to_string(n) +
                                  ")");
        }
    }
}

bool EmbeddedView::contains(std::size_t subsystem) const {
    return subsystem < blocks_.size() && blocks_[subsystem].present;
}

const EmbeddedView::Block& EmbeddedView::block(std::size_t subsystem) const {
    if (!contains(subsystem)) {
        throw ValidationError("subsystem " + std::to_string(subsystem) + " is not part of the embedded view");
    }
    return blocks_[subsystem];
}

std::size_t EmbeddedView::kappa(std::size_t subsystem) const { return block(subsystem).kappa; }
std::size_t EmbeddedView::tau(std::size_t subsystem) const { return block(subsystem).tau; }

int EmbeddedView::alphabet(std::size_t subsystem) const {
    if (!discrete_) {
        throw ValidationError("alphabet size requested from a real-valued view");
    }
    return block(subsystem).alphabet;
}

std::span<const double> EmbeddedView::present(std::size_t subsystem) const { return block(subsystem).target; }

std::span<const double> EmbeddedView::history(std::size_t subsystem, std::size_t lag) const {
    return block(subsystem).lags.at(lag);
}

EmbeddedView embed_columns(const std::vector<std::vector<double>>& columns, const std::vector<std::string>& names,
                           const std::vector<int>& alphabets, const EmbeddingSpec& spec,
                           std::span<const std::size_t> subsystems, bool discrete) {
    const std::size_t m = columns.size();
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    spec.validate(m, n);

    std::vector<std::size_t> chosen = subsystems.empty() ? all_indices(m)
                                                         : std::vector<std::size_t>(subsystems.begin(), subsystems.end());
    std::sort(chosen.begin(), chosen.end());
    if (std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end()) {
        throw ValidationError("duplicate subsystem in embedding selection");
    }
    if (!chosen.empty() && chosen.back() >= m) {
        throw ValidationError("subsystem index " + std::to_string(chosen.back()) + " out of range");
    }

    EmbeddedView view;
    view.discrete_ = discrete;
    view.names_ = names;
    view.embedded_ = chosen;
    view.blocks_.resize(m);
    for (const auto i : chosen) {
        view.offset_ = std::max(view.offset_, spec.depth(i));
    }
    view.rows_ = n - 1 - view.offset_;

    for (const auto i : chosen) {
        auto& b = view.blocks_[i];
        b.present = true;
        b.tau = spec.tau[i];
        b.kappa = spec.kappa[i];
        b.alphabet = discrete ? alphabets.at(i) : 0;
        const auto& y = columns[i];
        b.target.resize(view.rows_);
        b.lags.assign(b.kappa, std::vector<double>(view.rows_));
        for (std::size_t t = 0; t < view.rows_; ++t) {
            const std::size_t time = t + view.offset_;
            b.target[t] = y[time + 1];
            for (std::size_t k = 0; k < b.kappa; ++k) {
                b.lags[k][t] = y[time - k * b.tau];
            }
        }
    }
    return view;
}

TimeSeriesSet parse_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError(source + ": missing header row");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    std::vector<std::string> names;
    for (auto& cell : split_line(line)) {
        names.push_back(unquote(cell));
    }
    std::unordered_set<std::string> seen;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c].empty()) {
            throw ValidationError(source + ": empty column name in header at column " + std::to_string(c + 1));
        }
        if (!seen.insert(names[c]).second) {
            throw ValidationError(source + ": duplicate header '" + names[c] + "' at column " + std::to_string(c + 1));
        }
    }

    std::vector<std::vector<double>> series(names.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != names.size()) {
            throw ValidationError(source + ": ragged row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " + std::to_string(names.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            double value = 0.0;
            const auto* first = cell.data();
            const auto* last = cell.data() + cell.size();
            if (first != last && *first == '+') {
                ++first;
            }
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (cell.empty() || ec != std::errc() || ptr != last) {
                throw ValidationError(source + ": non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                                      ", column " + std::to_string(c + 1) + " (" + names[c] + ")");
            }
            if (!std::isfinite(value)) {
                throw ValidationError(source + ": non-finite cell '" + cell + "' at row " + std::to_string(row) +
                                      ", column " + std::to_string(c + 1) + " (" + names[c] + ")");
            }
            series[c].push_back(value);
        }
    }
    if (series.front().empty()) {
        throw ValidationError(source + ": empty body");
    }
    if (series.front().size() < 2) {
        throw ValidationError(source + ": at least 2 body rows are required");
    }
    return TimeSeriesSet(std::move(names), std::move(series));
}

TimeSeriesSet load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

std::string to_csv(const TimeSeriesSet& ts) {
    std::string out;
    const auto& names = ts.names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += (i ? "," : "") + names[i];
    }
    out += '\n';
    char buf[64];
    for (std::size_t t = 0; t < ts.sample_count(); ++t) {
        for (std::size_t i = 0; i < ts.subsystem_count(); ++i) {
            if (i) {
                out += ',';
            }
            const auto res = std::to_chars(buf, buf + sizeof buf, ts.series(i)[t]);
            out.append(buf, res.ptr);
        }
        out += '\n';
    }
    return out;
}

DiscretizedSeries discretize(const TimeSeriesSet& ts, std::span<const int> bins) {
    const std::size_t m = ts.subsystem_count();
    if (bins.size() != m) {
        throw ValidationError("discretize: " + std::to_string(bins.size()) + " bin counts for " + std::to_string(m) +
                              " subsystems");
    }
    DiscretizedSeries out;
    out.names = ts.names();
    out.symbols.resize(m);
    out.alphabet_sizes.assign(bins.begin(), bins.end());
    out.bin_edges.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const int b = bins[i];
        if (b < 2) {
            throw ValidationError("discretize: subsystem '" + ts.names()[i] + "' needs at least 2 bins");
        }
        const auto y = ts.series(i);
        const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
        const double lo = *lo_it;
        const double hi = *hi_it;
        if (!(hi > lo)) {
            throw ValidationError("discretize: zero-range series '" + ts.names()[i] + "'");
        }
        const double width = (hi - lo) / b;
        auto& edges = out.bin_edges[i];
        edges.resize(static_cast<std::size_t>(b) + 1);
        for (int k = 0; k <= b; ++k) {
            edges[static_cast<std::size_t>(k)] = lo + width * k;
        }
        edges.back() = hi;
        auto& sym = out.symbols[i];
        sym.resize(y.size());
        for (std::size_t t = 0; t < y.size(); ++t) {
            const auto s = static_cast<int>(std::floor((y[t] - lo) / width));
            sym[t] = std::clamp(s, 0, b - 1);
        }
    }
    return out;
}

DiscretizedSeries discretize(const TimeSeriesSet& ts, int bins) {
    const std::vector<int> all(ts.subsystem_count(), bins);
    return discretize(ts, all);
}

EmbeddedView delay_embed(const TimeSeriesSet& ts, const EmbeddingSpec& spec, std::span<const std::size_t> subsystems) {
    return embed_columns(ts.all_series(), ts.names(), {}, spec, subsystems, false);
}

EmbeddedView delay_embed(const DiscretizedSeries& ds, const EmbeddingSpec& spec,
                         std::span<const std::size_t> subsystems) {
    std::vector<std::vector<double>> columns(ds.subsystem_count());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        columns[i].assign(ds.symbols[i].begin(), ds.symbols[i].end());
        if (ds.alphabet_sizes.at(i) < 2) {
            throw ValidationError("discrete subsystem " + std::to_string(i) + " has alphabet size < 2");
        }
        for (const int s : ds.symbols[i]) {
            if (s < 0 || s >= ds.alphabet_sizes[i]) {
                throw ValidationError("symbol out of range in discrete subsystem " + std::to_string(i));
            }
        }
    }
    return embed_columns(columns, ds.names, ds.alphabet_sizes, spec, subsystems, true);
}

}  // namespace netinfer
