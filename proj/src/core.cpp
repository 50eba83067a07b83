#include "sprocket/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace sprocket {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:   return "InvalidArgument";
        case ErrorCode::EmptySeries:       return "EmptySeries";
        case ErrorCode::InputTooShort:     return "InputTooShort";
        case ErrorCode::LengthMismatch:    return "LengthMismatch";
        case ErrorCode::LabelMismatch:     return "LabelMismatch";
        case ErrorCode::TooFewInstances:   return "TooFewInstances";
        case ErrorCode::KernelTooWide:     return "KernelTooWide";
        case ErrorCode::EmptyActivation:   return "EmptyActivation";
        case ErrorCode::BandTooNarrow:     return "BandTooNarrow";
        case ErrorCode::ShapeMismatch:     return "ShapeMismatch";
        case ErrorCode::RowMismatch:       return "RowMismatch";
        case ErrorCode::SingleClass:       return "SingleClass";
        case ErrorCode::DegenerateAlphas:  return "DegenerateAlphas";
        case ErrorCode::EmptyTable:        return "EmptyTable";
        case ErrorCode::MalformedHeader:   return "MalformedHeader";
        case ErrorCode::RaggedLengths:     return "RaggedLengths";
        case ErrorCode::UnknownClassLabel: return "UnknownClassLabel";
        case ErrorCode::NonNumericCell:    return "NonNumericCell";
        case ErrorCode::ManifestError:     return "ManifestError";
        case ErrorCode::MissingColumns:    return "MissingColumns";
        case ErrorCode::ParseError:        return "ParseError";
        case ErrorCode::IoError:           return "IoError";
        case ErrorCode::ModelMismatch:     return "ModelMismatch";
    }
    return "UnknownError";
}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

// ---------------------------------------------------------------------------
// RandomStream
// ---------------------------------------------------------------------------

namespace {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RandomStream RandomStream::derive(std::string_view tag, std::uint64_t index) const {
    std::uint64_t child = seed_;
    child = mix64(child ^ fnv1a(tag));
    child = mix64(child ^ index);
    return RandomStream(child);
}

std::uint64_t RandomStream::next_u64() {
    return mix64(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double RandomStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
}

double RandomStream::next_normal() {
    // u1 must be strictly positive for the log.
    double u1 = 0.0;
    do {
        u1 = next_unit();
    } while (u1 <= 0.0);
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
    if (bound == 0) fail(ErrorCode::InvalidArgument, "next_below bound must be positive");
    if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

// ---------------------------------------------------------------------------
// TimeSeries / TimeSeriesDataset
// ---------------------------------------------------------------------------

TimeSeries::TimeSeries(std::vector<double> data, std::size_t n_channels, std::size_t n_length)
    : values(std::move(data)), channels(n_channels), length(n_length) {
    if (channels == 0 || length == 0)
        fail(ErrorCode::InvalidArgument, "series must have at least one channel and one point");
    if (values.size() != channels * length)
        fail(ErrorCode::LengthMismatch, "series buffer size does not match channels*length");
}

TimeSeries TimeSeries::univariate(std::vector<double> data) {
    const std::size_t n = data.size();
    return TimeSeries(std::move(data), 1, n);
}

void TimeSeriesDataset::validate() const {
    if (series.empty()) fail(ErrorCode::InvalidArgument, "dataset is empty");
    if (labels.size() != series.size())
        fail(ErrorCode::LabelMismatch, "label count does not match series count");
    const std::size_t l = series.front().length;
    const std::size_t c = series.front().channels;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].length != l || series[i].channels != c)
            fail(ErrorCode::LengthMismatch,
                 "series " + std::to_string(i) + " does not match dataset shape");
    }
    const int k = static_cast<int>(label_names.size());
    std::vector<bool> seen(label_names.size(), false);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k)
            fail(ErrorCode::LabelMismatch,
                 "label of series " + std::to_string(i) + " is outside the dense range");
        seen[static_cast<std::size_t>(labels[i])] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c])
            fail(ErrorCode::LabelMismatch, "class " + std::to_string(c) + " never occurs");
    }
}

TimeSeriesDataset align_labels(const TimeSeriesDataset& reference, TimeSeriesDataset other) {
    std::map<std::string, int> codes;
    for (std::size_t i = 0; i < reference.label_names.size(); ++i)
        codes[reference.label_names[i]] = static_cast<int>(i);
    for (auto& lab : other.labels) {
        const std::string& name = other.label_names.at(static_cast<std::size_t>(lab));
        auto it = codes.find(name);
        if (it == codes.end())
            fail(ErrorCode::UnknownClassLabel,
                 "label '" + name + "' missing from reference dictionary");
        lab = it->second;
    }
    other.label_names = reference.label_names;
    return other;
}

void znormalize_inplace(std::span<double> x) {
    if (x.empty()) return;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
        for (double& v : x) v = (v - mean) / sd;
    } else {
        for (double& v : x) v = 0.0;
    }
}

TimeSeries znormalize(const TimeSeries& ts) {
    TimeSeries out = ts;
    for (std::size_t c = 0; c < out.channels; ++c) znormalize_inplace(out.channel(c));
    return out;
}

// ---------------------------------------------------------------------------
// parallel_for
// ---------------------------------------------------------------------------

unsigned hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sprocket
