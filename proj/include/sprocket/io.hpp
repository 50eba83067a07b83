#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sprocket/core.hpp"

namespace sprocket {

// ---------------------------------------------------------------------------
// Dataset parsing
// ---------------------------------------------------------------------------

// sktime/aeon-style .ts file: @-directives, then one record per line with
// ':'-separated channels, comma-separated values, label after the final ':'.
// Labels are re-encoded densely by sorted label string; the originals stay
// in label_names.
TimeSeriesDataset parse_ts(const std::string& path);

enum class CsvLabelColumn { First, Last };

// Univariate rows of comma-separated values with the label in the declared
// column. Same dense label encoding as parse_ts.
TimeSeriesDataset parse_csv(const std::string& path, CsvLabelColumn label_column);

// ---------------------------------------------------------------------------
// Benchmark manifests
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string name;
    std::string train_path;
    std::string test_path;
    std::size_t instances = 0;  // expected train size
    std::size_t length = 0;
    std::size_t channels = 0;
    std::size_t classes = 0;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

// JSON manifest {"entries": [{name, train, test, instances, length,
// channels, classes}]}; all paths must be distinct.
DatasetManifest parse_manifest(const std::string& path);

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

struct ResultRecord {
    std::string dataset;
    std::string algorithm;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double transform_s = 0.0;
    double fit_s = 0.0;
    double predict_s = 0.0;
    std::uint64_t distance_calls = 0;
    std::uint64_t feature_count = 0;
};

enum class ResultFormat { Json, Csv };

// Round-trip safe in both formats: doubles are printed with shortest
// exact representations.
void write_results(const std::vector<ResultRecord>& records, const std::string& path,
                   ResultFormat format);

// Format sniffed from the content (JSON array vs CSV header).
std::vector<ResultRecord> read_results(const std::string& path);

// ---------------------------------------------------------------------------
// Per-instance correctness sidecar (feeds the analysis grids)
// ---------------------------------------------------------------------------

struct CorrectnessRecord {
    std::string dataset;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::uint64_t instance = 0;
    int correct = 0;  // 0/1
};

void write_correctness(const std::vector<CorrectnessRecord>& records, const std::string& path);
std::vector<CorrectnessRecord> read_correctness(const std::string& path);

}  // namespace sprocket
