#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "sprocket/core.hpp"

namespace testutil {

// Scoped temp directory; everything inside is removed on destruction.
class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate = base / ("sprocket-test-" + std::to_string(std::random_device{}()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline std::string write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    out.close();
    return p.string();
}

// Random univariate dataset with the given class count; series in class k get
// mean k so the labels are learnable but the data stays generic.
inline sprocket::TimeSeriesDataset random_dataset(std::size_t n, std::size_t length,
                                                  std::size_t classes, std::uint64_t seed,
                                                  double class_shift = 1.0) {
    sprocket::RandomStream rng(seed);
    sprocket::TimeSeriesDataset ds;
    ds.name = "synthetic";
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t label = i % classes;
        std::vector<double> v(length);
        for (auto& x : v)
            x = rng.next_normal() + class_shift * static_cast<double>(label);
        ds.series.push_back(sprocket::TimeSeries::univariate(std::move(v)));
        ds.labels.push_back(label);
    }
    for (std::size_t c = 0; c < classes; ++c)
        ds.label_names.push_back("c" + std::to_string(c));
    ds.validate();
    return ds;
}

inline std::vector<double> random_series(std::size_t length, sprocket::RandomStream& rng,
                                         double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(length);
    for (auto& x : v) x = rng.next_uniform(lo, hi);
    return v;
}

}  // namespace testutil
