#include "sprocket/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sprocket {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty() && current.back() == '\r') current.pop_back();
    if (!current.empty()) lines.push_back(current);
    return lines;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

bool parse_value(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Dense label encoding by sorted unique label string.
void encode_labels(const std::vector<std::string>& raw, TimeSeriesDataset& ds) {
    std::set<std::string> uniq(raw.begin(), raw.end());
    ds.label_names.assign(uniq.begin(), uniq.end());
    std::map<std::string, int> code;
    for (std::size_t i = 0; i < ds.label_names.size(); ++i)
        code[ds.label_names[i]] = static_cast<int>(i);
    ds.labels.clear();
    ds.labels.reserve(raw.size());
    for (const auto& s : raw) ds.labels.push_back(code.at(s));
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

[[noreturn]] void fail_at(ErrorCode code, std::size_t lineno, const std::string& message) {
    fail(code, "line " + std::to_string(lineno) + ": " + message);
}

}  // namespace

// ---------------------------------------------------------------------------
// .ts parser
// ---------------------------------------------------------------------------

TimeSeriesDataset parse_ts(const std::string& path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);

    TimeSeriesDataset ds;
    std::vector<std::string> raw_labels;
    std::set<std::string> declared;
    bool in_data = false;
    std::size_t channels = 0;
    std::size_t length = 0;

    for (std::size_t lineno = 1; lineno <= lines.size(); ++lineno) {
        const std::string_view line = trim(lines[lineno - 1]);
        if (line.empty() || line.front() == '#') continue;

        if (!in_data) {
            if (line.front() != '@')
                fail_at(ErrorCode::MalformedHeader, lineno,
                        "expected an @directive before the data section");
            const std::size_t sp = line.find_first_of(" \t");
            const std::string word = lower(line.substr(1, sp == std::string_view::npos
                                                              ? std::string_view::npos
                                                              : sp - 1));
            const std::string_view rest =
                sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp + 1));

            if (word == "data") {
                in_data = true;
            } else if (word == "problemname") {
                ds.name = std::string(rest);
            } else if (word == "equallength") {
                if (lower(rest) == "false")
                    fail_at(ErrorCode::MalformedHeader, lineno,
                            "unequal-length datasets are not supported");
            } else if (word == "classlabel") {
                const auto tokens = split(rest, ' ');
                if (tokens.empty() || lower(trim(tokens.front())) != "true")
                    fail_at(ErrorCode::MalformedHeader, lineno,
                            "@classLabel must be 'true' with a label list");
                for (std::size_t t = 1; t < tokens.size(); ++t) {
                    const auto tok = trim(tokens[t]);
                    if (!tok.empty()) declared.insert(std::string(tok));
                }
            }
            // @univariate, @timeStamps, @missing, @seriesLength, ... are
            // accepted and ignored; shape is inferred from the records.
            continue;
        }

        // data record: channel:channel:...:label
        const auto segments = split(line, ':');
        if (segments.size() < 2)
            fail_at(ErrorCode::MalformedHeader, lineno, "record carries no class label");
        const std::string label(trim(segments.back()));
        if (label.empty())
            fail_at(ErrorCode::MalformedHeader, lineno, "record carries an empty class label");
        if (!declared.empty() && declared.find(label) == declared.end())
            fail_at(ErrorCode::UnknownClassLabel, lineno,
                    "label '" + label + "' is not in the declared @classLabel set");

        const std::size_t m = segments.size() - 1;
        if (channels == 0) {
            channels = m;
        } else if (m != channels) {
            fail_at(ErrorCode::RaggedLengths, lineno,
                    "record has " + std::to_string(m) + " channels, expected " +
                        std::to_string(channels));
        }

        std::vector<double> values;
        for (std::size_t c = 0; c < m; ++c) {
            const auto cells = split(segments[c], ',');
            if (length == 0 && c == 0) {
                length = cells.size();
                values.reserve(channels * length);
            }
            if (cells.size() != length)
                fail_at(ErrorCode::RaggedLengths, lineno,
                        "channel " + std::to_string(c) + " has " + std::to_string(cells.size()) +
                            " values, expected " + std::to_string(length));
            for (const auto& cell : cells) {
                double v = 0.0;
                if (!parse_value(cell, v))
                    fail_at(ErrorCode::NonNumericCell, lineno,
                            "cannot parse '" + std::string(trim(cell)) + "' as a number");
                values.push_back(v);
            }
        }
        ds.series.emplace_back(std::move(values), channels, length);
        raw_labels.push_back(label);
    }

    if (!in_data) fail(ErrorCode::MalformedHeader, "no @data section in '" + path + "'");
    if (ds.series.size() < 2)
        fail(ErrorCode::MalformedHeader, "'" + path + "' holds fewer than 2 records");
    if (ds.name.empty()) ds.name = stem_of(path);
    encode_labels(raw_labels, ds);
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// CSV parser (univariate)
// ---------------------------------------------------------------------------

TimeSeriesDataset parse_csv(const std::string& path, CsvLabelColumn label_column) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);

    TimeSeriesDataset ds;
    std::vector<std::string> raw_labels;
    std::size_t length = 0;

    for (std::size_t lineno = 1; lineno <= lines.size(); ++lineno) {
        const std::string_view line = trim(lines[lineno - 1]);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() < 2)
            fail_at(ErrorCode::RaggedLengths, lineno, "row needs at least one value and a label");

        const std::size_t label_idx = label_column == CsvLabelColumn::First ? 0 : cells.size() - 1;
        const std::string label(trim(cells[label_idx]));
        if (label.empty()) fail_at(ErrorCode::RaggedLengths, lineno, "empty label cell");

        std::vector<double> values;
        values.reserve(cells.size() - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_idx) continue;
            double v = 0.0;
            if (!parse_value(cells[c], v))
                fail_at(ErrorCode::NonNumericCell, lineno,
                        "cannot parse '" + std::string(trim(cells[c])) + "' as a number");
            values.push_back(v);
        }
        if (length == 0) {
            length = values.size();
        } else if (values.size() != length) {
            fail_at(ErrorCode::RaggedLengths, lineno,
                    "row has " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(length));
        }
        ds.series.push_back(TimeSeries::univariate(std::move(values)));
        raw_labels.push_back(label);
    }

    if (ds.series.empty()) fail(ErrorCode::MalformedHeader, "'" + path + "' holds no rows");
    if (ds.series.size() < 2)
        fail(ErrorCode::MalformedHeader, "'" + path + "' holds fewer than 2 rows");
    ds.name = stem_of(path);
    encode_labels(raw_labels, ds);
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

DatasetManifest parse_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ManifestError, "cannot open manifest '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::ManifestError, "manifest '" + path + "' is not valid JSON: " + e.what());
    }

    DatasetManifest manifest;
    std::set<std::string> seen_paths;
    try {
        for (const json& ej : j.at("entries")) {
            ManifestEntry e;
            e.name = ej.at("name").get<std::string>();
            e.train_path = ej.at("train").get<std::string>();
            e.test_path = ej.at("test").get<std::string>();
            e.instances = ej.at("instances").get<std::size_t>();
            e.length = ej.at("length").get<std::size_t>();
            e.channels = ej.at("channels").get<std::size_t>();
            e.classes = ej.at("classes").get<std::size_t>();
            if (e.instances == 0 || e.length == 0 || e.channels == 0 || e.classes == 0)
                fail(ErrorCode::ManifestError,
                     "manifest entry '" + e.name + "' has nonpositive expected metadata");
            if (!seen_paths.insert(e.train_path).second || !seen_paths.insert(e.test_path).second)
                fail(ErrorCode::ManifestError,
                     "manifest entry '" + e.name + "' repeats a dataset path");
            manifest.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ManifestError, "manifest '" + path + "' is incomplete: " + e.what());
    }
    return manifest;
}

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kResultHeader =
    "dataset,algorithm,seed,accuracy,transform_s,fit_s,predict_s,distance_calls,feature_count";

std::string format_double(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// One CSV line into fields, honoring double-quote escaping.
std::vector<std::string> csv_fields(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (quoted) fail_at(ErrorCode::ParseError, lineno, "unterminated quoted field");
    fields.push_back(current);
    return fields;
}

template <typename T>
T parse_integer(const std::string& cell, std::size_t lineno) {
    T value{};
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        fail_at(ErrorCode::ParseError, lineno, "cannot parse integer '" + cell + "'");
    return value;
}

double parse_real(const std::string& cell, std::size_t lineno) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        fail_at(ErrorCode::ParseError, lineno, "cannot parse number '" + cell + "'");
    return value;
}

json record_to_json(const ResultRecord& r) {
    return json{{"dataset", r.dataset},
                {"algorithm", r.algorithm},
                {"seed", r.seed},
                {"accuracy", r.accuracy},
                {"transform_s", r.transform_s},
                {"fit_s", r.fit_s},
                {"predict_s", r.predict_s},
                {"distance_calls", r.distance_calls},
                {"feature_count", r.feature_count}};
}

ResultRecord record_from_json(const json& j) {
    ResultRecord r;
    r.dataset = j.at("dataset").get<std::string>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.transform_s = j.at("transform_s").get<double>();
    r.fit_s = j.at("fit_s").get<double>();
    r.predict_s = j.at("predict_s").get<double>();
    r.distance_calls = j.at("distance_calls").get<std::uint64_t>();
    r.feature_count = j.at("feature_count").get<std::uint64_t>();
    return r;
}

}  // namespace

void write_results(const std::vector<ResultRecord>& records, const std::string& path,
                   ResultFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");

    if (format == ResultFormat::Json) {
        json arr = json::array();
        for (const auto& r : records) arr.push_back(record_to_json(r));
        out << arr.dump(2) << '\n';
    } else {
        out << kResultHeader << '\n';
        for (const auto& r : records) {
            out << csv_escape(r.dataset) << ',' << csv_escape(r.algorithm) << ',' << r.seed << ','
                << format_double(r.accuracy) << ',' << format_double(r.transform_s) << ','
                << format_double(r.fit_s) << ',' << format_double(r.predict_s) << ','
                << r.distance_calls << ',' << r.feature_count << '\n';
        }
    }
    out.flush();
    if (!out) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

std::vector<ResultRecord> read_results(const std::string& path) {
    const std::string text = read_file(path);
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        fail(ErrorCode::ParseError, "'" + path + "' is empty");

    std::vector<ResultRecord> records;
    if (text[first] == '[') {
        json j;
        try {
            j = json::parse(text);
            for (const json& rj : j) records.push_back(record_from_json(rj));
        } catch (const json::exception& e) {
            fail(ErrorCode::ParseError, "results '" + path + "' malformed: " + e.what());
        }
        return records;
    }

    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != kResultHeader)
        fail(ErrorCode::MissingColumns,
             "'" + path + "' does not start with the result header '" + kResultHeader + "'");
    for (std::size_t lineno = 2; lineno <= lines.size(); ++lineno) {
        if (trim(lines[lineno - 1]).empty()) continue;
        const auto fields = csv_fields(lines[lineno - 1], lineno);
        if (fields.size() != 9)
            fail_at(ErrorCode::MissingColumns, lineno,
                    "expected 9 result columns, found " + std::to_string(fields.size()));
        ResultRecord r;
        r.dataset = fields[0];
        r.algorithm = fields[1];
        r.seed = parse_integer<std::uint64_t>(fields[2], lineno);
        r.accuracy = parse_real(fields[3], lineno);
        r.transform_s = parse_real(fields[4], lineno);
        r.fit_s = parse_real(fields[5], lineno);
        r.predict_s = parse_real(fields[6], lineno);
        r.distance_calls = parse_integer<std::uint64_t>(fields[7], lineno);
        r.feature_count = parse_integer<std::uint64_t>(fields[8], lineno);
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Correctness sidecar
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kCorrectnessHeader = "dataset,algorithm,seed,instance,correct";
}

void write_correctness(const std::vector<CorrectnessRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << kCorrectnessHeader << '\n';
    for (const auto& r : records) {
        if (r.correct != 0 && r.correct != 1)
            fail(ErrorCode::InvalidArgument, "correctness entries must be 0 or 1");
        out << csv_escape(r.dataset) << ',' << csv_escape(r.algorithm) << ',' << r.seed << ','
            << r.instance << ',' << r.correct << '\n';
    }
    out.flush();
    if (!out) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

std::vector<CorrectnessRecord> read_correctness(const std::string& path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != kCorrectnessHeader)
        fail(ErrorCode::MissingColumns,
             "'" + path + "' does not start with '" + std::string(kCorrectnessHeader) + "'");
    std::vector<CorrectnessRecord> records;
    for (std::size_t lineno = 2; lineno <= lines.size(); ++lineno) {
        if (trim(lines[lineno - 1]).empty()) continue;
        const auto fields = csv_fields(lines[lineno - 1], lineno);
        if (fields.size() != 5)
            fail_at(ErrorCode::MissingColumns, lineno,
                    "expected 5 correctness columns, found " + std::to_string(fields.size()));
        CorrectnessRecord r;
        r.dataset = fields[0];
        r.algorithm = fields[1];
        r.seed = parse_integer<std::uint64_t>(fields[2], lineno);
        r.instance = parse_integer<std::uint64_t>(fields[3], lineno);
        r.correct = parse_integer<int>(fields[4], lineno);
        if (r.correct != 0 && r.correct != 1)
            fail_at(ErrorCode::ParseError, lineno, "correct column must be 0 or 1");
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace sprocket
