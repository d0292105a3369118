#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace netinfer {

/// M aligned scalar observation sequences of common length N.
class TimeSeriesSet {
public:
    TimeSeriesSet() = default;

    /// Throws ValidationError unless all series share a length N >= 2, every
    /// value is finite and names are unique.
    TimeSeriesSet(std::vector<std::string> names, std::vector<std::vector<double>> series);

    std::size_t subsystem_count() const { return series_.size(); }
    std::size_t sample_count() const { return series_.empty() ? 0 : series_.front().size(); }

    const std::vector<std::string>& names() const { return names_; }
    std::span<const double> series(std::size_t i) const { return series_.at(i); }
    const std::vector<std::vector<double>>& all_series() const { return series_; }

    /// Index of the named column; throws ValidationError when absent.
    std::size_t index_of(const std::string& name) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> series_;
};

/// Integer-coded observations produced by equal-width binning.
struct DiscretizedSeries {
    std::vector<std::string> names;
    std::vector<std::vector<int>> symbols;
    std::vector<int> alphabet_sizes;
    std::vector<std::vector<double>> bin_edges;

    std::size_t subsystem_count() const { return symbols.size(); }
    std::size_t sample_count() const { return symbols.empty() ? 0 : symbols.front().size(); }
};

/// Per-subsystem backward lag and embedding dimension.
struct EmbeddingSpec {
    std::vector<std::size_t> tau;
    std::vector<std::size_t> kappa;

    static EmbeddingSpec uniform(std::size_t subsystems, std::size_t tau = 1, std::size_t kappa = 2);

    std::size_t subsystem_count() const { return tau.size(); }
    std::size_t depth(std::size_t i) const { return (kappa.at(i) - 1) * tau.at(i); }

    /// Checks tau, kappa >= 1 and that every embedding fits into n samples.
    void validate(std::size_t subsystems, std::size_t n) const;
};

/// Delay-embedded observations trimmed to one common row range.
///
/// Row t corresponds to time index n = t + offset(), where offset() is the
/// largest embedding depth among the embedded subsystems. For subsystem i the
/// present sample is y^i_{n+1} and lag k of its history is y^i_{n - k tau^i}.
class EmbeddedView {
public:
    std::size_t rows() const { return rows_; }
    std::size_t offset() const { return offset_; }
    std::size_t total_subsystems() const { return blocks_.size(); }
    const std::vector<std::size_t>& subsystems() const { return embedded_; }
    bool contains(std::size_t subsystem) const;
    bool covers_all() const { return embedded_.size() == blocks_.size(); }
    bool is_discrete() const { return discrete_; }

    std::size_t kappa(std::size_t subsystem) const;
    std::size_t tau(std::size_t subsystem) const;
    /// Alphabet size of a discrete view; throws for real-valued views.
    int alphabet(std::size_t subsystem) const;
    const std::vector<std::string>& names() const { return names_; }

    std::span<const double> present(std::size_t subsystem) const;
    std::span<const double> history(std::size_t subsystem, std::size_t lag) const;

private:
    friend EmbeddedView embed_columns(const std::vector<std::vector<double>>&, const std::vector<std::string>&,
                                      const std::vector<int>&, const EmbeddingSpec&,
                                      std::span<const std::size_t>, bool);

    struct Block {
        bool present = false;
        std::size_t tau = 0;
        std::size_t kappa = 0;
        int alphabet = 0;
        std::vector<double> target;
        std::vector<std::vector<double>> lags;
    };

    const Block& block(std::size_t subsystem) const;

    std::size_t rows_ = 0;
    std::size_t offset_ = 0;
    bool discrete_ = false;
    std::vector<std::string> names_;
    std::vector<std::size_t> embedded_;
    std::vector<Block> blocks_;
};

/// Reads a header-plus-body CSV of finite reals. Column order defines subsystem order.
/// Errors cite 1-based file line numbers (the header is row 1) and 1-based columns.
TimeSeriesSet load_csv(const std::filesystem::path& path);

/// Parses CSV text; `source` is only used in error messages.
TimeSeriesSet parse_csv(const std::string& text, const std::string& source = "<memory>");

/// Shortest round-trip formatting, one row per sample.
std::string to_csv(const TimeSeriesSet& ts);

/// Equal-width binning over [min, max] of each series; the last bin is right-closed.
DiscretizedSeries discretize(const TimeSeriesSet& ts, std::span<const int> bins);
DiscretizedSeries discretize(const TimeSeriesSet& ts, int bins);

EmbeddedView delay_embed(const TimeSeriesSet& ts, const EmbeddingSpec& spec,
                         std::span<const std::size_t> subsystems = {});
EmbeddedView delay_embed(const DiscretizedSeries& ds, const EmbeddingSpec& spec,
                         std::span<const std::size_t> subsystems = {});

}  // namespace netinfer
