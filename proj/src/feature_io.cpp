#include "csmcover/feature_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "csmcover/errors.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

namespace {

int parse_int(const std::string& field, const std::string& origin, std::size_t line, const char* what) {
    int value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw ParseError(origin, line, std::string("invalid ") + what + " '" + field + "'");
    }
    return value;
}

double parse_double(const std::string& field, const std::string& origin, std::size_t line) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty() || !std::isfinite(value)) {
        throw ParseError(origin, line, "invalid number '" + field + "'");
    }
    return value;
}

struct RowBuffer {
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;

    Split to_split(Eigen::Index d) const {
        Split s;
        s.features.resize(static_cast<Eigen::Index>(rows.size()), d);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                s.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
            }
        }
        s.labels = labels;
        return s;
    }
};

void append_split(std::string& out, int id, const char* split_name, const Split& split) {
    for (std::size_t i = 0; i < split.size(); ++i) {
        out += std::to_string(id);
        out += ',';
        out += split_name;
        out += ',';
        out += label_name(split.labels[i]);
        for (Eigen::Index j = 0; j < split.dimension(); ++j) {
            out += ',';
            out += format_double(split.features(static_cast<Eigen::Index>(i), j));
        }
        out += '\n';
    }
}

}  // namespace

std::string features_to_csv(const std::vector<SourceDataset>& datasets) {
    if (datasets.empty()) throw ValidationError("no datasets to write");
    const auto d = datasets.front().dimension();
    std::string out = "source_id,split,label";
    for (Eigen::Index j = 0; j < d; ++j) out += ",f" + std::to_string(j);
    out += '\n';
    for (const auto& ds : datasets) {
        if (ds.dimension() != d) throw ValidationError("datasets differ in feature dimension");
        append_split(out, ds.source_id, "train", ds.train);
        append_split(out, ds.source_id, "test", ds.test);
    }
    return out;
}

std::vector<SourceDataset> features_from_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(origin, 1, "missing header");
    ++line_no;
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "source_id" || header[1] != "split" || header[2] != "label") {
        throw ParseError(origin, line_no, "header must start with source_id,split,label,f0");
    }
    const std::size_t d = header.size() - 3;
    for (std::size_t j = 0; j < d; ++j) {
        if (header[j + 3] != "f" + std::to_string(j)) {
            throw ParseError(origin, line_no, "expected column f" + std::to_string(j) + ", got '" + header[j + 3] + "'");
        }
    }

    std::map<int, std::pair<RowBuffer, RowBuffer>> by_source;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != d + 3) {
            throw ParseError(origin, line_no, "expected " + std::to_string(d + 3) + " fields, got " +
                                                  std::to_string(fields.size()));
        }
        const int id = parse_int(fields[0], origin, line_no, "source_id");
        auto& entry = by_source[id];
        RowBuffer* target = nullptr;
        if (fields[1] == "train") {
            target = &entry.first;
        } else if (fields[1] == "test") {
            target = &entry.second;
        } else {
            throw ParseError(origin, line_no, "unknown split '" + fields[1] + "'");
        }
        Label label{};
        if (fields[2] == "cover") {
            label = Label::Cover;
        } else if (fields[2] == "stego") {
            label = Label::Stego;
        } else {
            throw ParseError(origin, line_no, "unknown label '" + fields[2] + "'");
        }
        std::vector<double> row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = parse_double(fields[j + 3], origin, line_no);
        target->rows.push_back(std::move(row));
        target->labels.push_back(label);
    }

    std::vector<SourceDataset> out;
    for (const auto& [id, buffers] : by_source) {
        SourceDataset ds;
        ds.source_id = id;
        ds.train = buffers.first.to_split(static_cast<Eigen::Index>(d));
        ds.test = buffers.second.to_split(static_cast<Eigen::Index>(d));
        try {
            validate_dataset(ds);
        } catch (const ValidationError& e) {
            throw ValidationError(origin + ": " + e.what());
        }
        out.push_back(std::move(ds));
    }
    if (out.empty()) throw ParseError(origin, line_no, "no data rows");
    return out;
}

void save_feature_file(const std::vector<SourceDataset>& datasets, const std::filesystem::path& path) {
    write_text_file(path, features_to_csv(datasets));
}

std::vector<SourceDataset> load_feature_files(const std::filesystem::path& path) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ValidationError("no .csv feature files in " + path.string());
    } else {
        files.push_back(path);
    }
    std::vector<SourceDataset> all;
    for (const auto& f : files) {
        auto part = features_from_csv(read_text_file(f), f.string());
        for (auto& ds : part) all.push_back(std::move(ds));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.source_id < b.source_id; });
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i].source_id == all[i - 1].source_id) {
            throw ValidationError("source " + std::to_string(all[i].source_id) + " appears in several files");
        }
        if (all[i].dimension() != all[0].dimension()) {
            throw ValidationError("source " + std::to_string(all[i].source_id) + " has dimension " +
                                  std::to_string(all[i].dimension()) + ", expected " +
                                  std::to_string(all[0].dimension()));
        }
    }
    return all;
}

std::string regret_to_csv(const RegretMatrix& m) {
    std::string out = "train/eval";
    for (int id : m.source_ids) out += "," + std::to_string(id);
    out += '\n';
    for (std::size_t s = 0; s < m.size(); ++s) {
        out += std::to_string(m.source_ids[s]);
        for (std::size_t t = 0; t < m.size(); ++t) {
            out += ',';
            out += format_double(m.regret(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)));
        }
        out += '\n';
    }
    return out;
}

RegretMatrix regret_from_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(origin, 1, "missing header row");
    ++line_no;
    const auto header = split_csv_line(line);
    if (header.size() < 2) throw ParseError(origin, line_no, "header row lists no sources");
    RegretMatrix m;
    for (std::size_t c = 1; c < header.size(); ++c) {
        m.source_ids.push_back(parse_int(header[c], origin, line_no, "source id"));
    }
    const auto n = m.source_ids.size();
    m.regret.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != n + 1) {
            throw ParseError(origin, line_no, "expected " + std::to_string(n + 1) + " fields, got " +
                                                  std::to_string(fields.size()));
        }
        if (row >= n) throw ParseError(origin, line_no, "more rows than sources");
        const int id = parse_int(fields[0], origin, line_no, "source id");
        if (id != m.source_ids[row]) {
            throw ParseError(origin, line_no, "row source " + std::to_string(id) + " does not match column order (" +
                                                  std::to_string(m.source_ids[row]) + ")");
        }
        for (std::size_t t = 0; t < n; ++t) {
            m.regret(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(t)) =
                parse_double(fields[t + 1], origin, line_no);
        }
        ++row;
    }
    if (row != n) throw ParseError(origin, line_no, "expected " + std::to_string(n) + " rows, got " + std::to_string(row));
    try {
        validate_regret_matrix(m);
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    return m;
}

nlohmann::ordered_json regret_sidecar(const RegretMatrix& m, const nlohmann::ordered_json& provenance) {
    nlohmann::ordered_json j;
    j["source_ids"] = m.source_ids;
    j["intrinsic"] = m.intrinsic;
    j["test_sizes"] = m.test_sizes;
    j["provenance"] = provenance;
    return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

void save_regret_matrix(const RegretMatrix& m, const std::filesystem::path& csv_path,
                        const nlohmann::ordered_json& provenance) {
    write_text_file(csv_path, regret_to_csv(m));
    write_text_file(sidecar_path(csv_path), regret_sidecar(m, provenance).dump(2) + "\n");
}

RegretMatrix load_regret_matrix(const std::filesystem::path& csv_path) {
    auto m = regret_from_csv(read_text_file(csv_path), csv_path.string());
    const auto side = sidecar_path(csv_path);
    if (std::filesystem::exists(side)) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(side));
            if (j.at("source_ids").get<std::vector<int>>() != m.source_ids) {
                throw ValidationError(side.string() + ": source ids do not match " + csv_path.string());
            }
            m.intrinsic = j.at("intrinsic").get<std::vector<double>>();
            if (j.contains("test_sizes")) m.test_sizes = j["test_sizes"].get<std::vector<std::size_t>>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(side.string() + ": " + e.what());
        }
        validate_regret_matrix(m);
    }
    return m;
}

}  // namespace csmcover
