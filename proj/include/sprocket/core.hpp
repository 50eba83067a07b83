#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sprocket {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
    InvalidArgument,
    // dataset / series shape
    EmptySeries,
    InputTooShort,
    LengthMismatch,
    LabelMismatch,
    TooFewInstances,
    // kernels
    KernelTooWide,
    EmptyActivation,
    // distances
    BandTooNarrow,
    // features / ridge
    ShapeMismatch,
    RowMismatch,
    SingleClass,
    DegenerateAlphas,
    // analysis
    EmptyTable,
    // io / parsing
    MalformedHeader,
    RaggedLengths,
    UnknownClassLabel,
    NonNumericCell,
    ManifestError,
    MissingColumns,
    ParseError,
    IoError,
    ModelMismatch,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

// ---------------------------------------------------------------------------
// Deterministic random stream
//
// Counter-based splitmix64. A stream is (seed, counter); derived streams mix
// a tag hash and child index into the parent's immutable seed, so derivation
// is independent of how many draws the parent has made.
// ---------------------------------------------------------------------------

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), counter_(0) {}

    // Child stream for ("kernel", 3) style addressing. Same (tag, index) on
    // the same parent always yields the same child, draws elsewhere do not
    // disturb it.
    RandomStream derive(std::string_view tag, std::uint64_t index) const;

    std::uint64_t next_u64();

    // Uniform in [0, 1): 53 mantissa bits.
    double next_unit();

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi);

    // Standard normal via Box-Muller, no spare caching: every call consumes
    // exactly two uniform draws, which keeps draw positions predictable.
    double next_normal();

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound);

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

// ---------------------------------------------------------------------------
// Series and dataset
// ---------------------------------------------------------------------------

// Channel-major storage: values[c*length + t].
struct TimeSeries {
    std::vector<double> values;
    std::size_t channels = 0;
    std::size_t length = 0;

    TimeSeries() = default;
    TimeSeries(std::vector<double> data, std::size_t n_channels, std::size_t n_length);

    static TimeSeries univariate(std::vector<double> data);

    std::span<const double> channel(std::size_t c) const {
        return {values.data() + c * length, length};
    }
    std::span<double> channel(std::size_t c) {
        return {values.data() + c * length, length};
    }
};

// Equal-length, equal-channel collection with dense integer labels.
// label_names maps dense code -> original label string, sorted.
struct TimeSeriesDataset {
    std::string name;
    std::vector<TimeSeries> series;
    std::vector<int> labels;
    std::vector<std::string> label_names;

    std::size_t size() const { return series.size(); }
    std::size_t length() const { return series.empty() ? 0 : series.front().length; }
    std::size_t channels() const { return series.empty() ? 0 : series.front().channels; }
    std::size_t class_count() const { return label_names.size(); }

    // Structural invariants: nonempty, one label per series, uniform shape,
    // labels dense in [0, class_count).
    void validate() const;
};

// Re-encode other's labels using reference's label dictionary. Labels present
// in other but absent from reference raise UnknownClassLabel.
TimeSeriesDataset align_labels(const TimeSeriesDataset& reference, TimeSeriesDataset other);

// Per-channel z-normalization; zero-variance channels are centered only.
TimeSeries znormalize(const TimeSeries& ts);
void znormalize_inplace(std::span<double> x);

// ---------------------------------------------------------------------------
// Parallel loop
// ---------------------------------------------------------------------------

// Runs fn(i) for i in [0, count) over `threads` workers with atomic index
// dispatch. threads <= 1 runs inline. Exceptions from workers are rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

unsigned hardware_threads();

}  // namespace sprocket
