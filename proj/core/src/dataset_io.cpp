#include "m3s/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace m3s {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

using nlohmann::json;

double parse_float(const std::string& cell, std::size_t row, const char* what) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("row " + std::to_string(row) + ": bad " + what + " value '" +
                         cell + "'");
    }
    return v;
}

bool parse_flag(const std::string& cell, std::size_t row, const char* what) {
    if (cell == "0") return false;
    if (cell == "1") return true;
    throw ParseError("row " + std::to_string(row) + ": " + what +
                     " flag must be 0 or 1, got '" + cell + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string expected_header() {
    std::string header = "id,label,pci,eh,dm,aci,sm";
    for (std::size_t k = 0; k < kSequenceLength; ++k) {
        header += ",v" + std::to_string(k);
    }
    return header;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(line);
    const std::size_t expected_cols = 7 + kSequenceLength;
    if (header.size() != expected_cols) {
        throw SchemaError("header has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(expected_cols));
    }
    if (header[0] != "id" || header[1] != "label" || header[2] != "pci" ||
        header[3] != "eh" || header[4] != "dm" || header[5] != "aci" ||
        header[6] != "sm") {
        throw SchemaError("header must start with id,label,pci,eh,dm,aci,sm");
    }

    Dataset dataset;
    dataset.source = path.string();
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            ++row;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != expected_cols) {
            throw SchemaError("row " + std::to_string(row) + " has " +
                              std::to_string(cells.size()) + " columns, expected " +
                              std::to_string(expected_cols));
        }
        RamanSpectrum spec;
        spec.id = cells[0];
        if (cells[1] != "NA") {
            const auto label = parse_subtype(cells[1]);
            if (!label) {
                throw ParseError("row " + std::to_string(row) + ": unknown label '" +
                                 cells[1] + "'");
            }
            spec.label = *label;
        }
        for (int h = 0; h < kNumHistories; ++h) {
            spec.history[h] = parse_flag(cells[2 + h], row, kHistoryNames[h]);
        }
        spec.values.resize(kSequenceLength);
        for (std::size_t k = 0; k < kSequenceLength; ++k) {
            spec.values[k] = parse_float(cells[7 + k], row, "intensity");
        }
        validate_spectrum(spec);
        dataset.samples.push_back(std::move(spec));
        ++row;
    }
    return dataset;
}

Dataset load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");

    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SchemaError("top-level JSON value must be an array");

    Dataset dataset;
    dataset.source = path.string();
    for (std::size_t row = 0; row < doc.size(); ++row) {
        const json& obj = doc[row];
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("label") ||
            !obj.contains("history") || !obj.contains("values")) {
            throw SchemaError("row " + std::to_string(row) +
                              ": object needs id, label, history, values");
        }
        RamanSpectrum spec;
        spec.id = obj["id"].get<std::string>();
        if (!obj["label"].is_null()) {
            const std::string text = obj["label"].get<std::string>();
            if (text != "NA") {
                const auto label = parse_subtype(text);
                if (!label) {
                    throw ParseError("row " + std::to_string(row) +
                                     ": unknown label '" + text + "'");
                }
                spec.label = *label;
            }
        }
        const json& history = obj["history"];
        if (!history.is_array() || history.size() != kNumHistories) {
            throw SchemaError("row " + std::to_string(row) +
                              ": history must hold exactly 5 flags");
        }
        for (int h = 0; h < kNumHistories; ++h) {
            const int flag = history[h].get<int>();
            if (flag != 0 && flag != 1) {
                throw ParseError("row " + std::to_string(row) +
                                 ": history flags must be 0 or 1");
            }
            spec.history[h] = flag == 1;
        }
        const json& values = obj["values"];
        if (!values.is_array() || values.size() != kSequenceLength) {
            throw SchemaError("row " + std::to_string(row) + ": values has " +
                              std::to_string(values.size()) + " entries, expected " +
                              std::to_string(kSequenceLength));
        }
        spec.values.resize(kSequenceLength);
        for (std::size_t k = 0; k < kSequenceLength; ++k) {
            spec.values[k] = values[k].get<double>();
        }
        validate_spectrum(spec);
        dataset.samples.push_back(std::move(spec));
    }
    return dataset;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << expected_header() << '\n';
    for (const auto& spec : dataset.samples) {
        out << spec.id << ',' << (spec.label ? to_string(*spec.label) : "NA");
        for (int h = 0; h < kNumHistories; ++h) out << ',' << (spec.history[h] ? 1 : 0);
        for (double v : spec.values) out << ',' << format_double(v);
        out << '\n';
    }
}

void save_json(const Dataset& dataset, const std::filesystem::path& path) {
    json doc = json::array();
    for (const auto& spec : dataset.samples) {
        json obj;
        obj["id"] = spec.id;
        obj["label"] = spec.label ? json(to_string(*spec.label)) : json(nullptr);
        json history = json::array();
        for (int h = 0; h < kNumHistories; ++h) history.push_back(spec.history[h] ? 1 : 0);
        obj["history"] = std::move(history);
        obj["values"] = spec.values;
        doc.push_back(std::move(obj));
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace

DataFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? DataFormat::Json : DataFormat::Csv;
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    return format == DataFormat::Csv ? load_csv(path) : load_json(path);
}

Dataset load_dataset(const std::filesystem::path& path) {
    return load_dataset(path, format_from_path(path));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  DataFormat format) {
    if (format == DataFormat::Csv) {
        save_csv(dataset, path);
    } else {
        save_json(dataset, path);
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    save_dataset(dataset, path, format_from_path(path));
}

}  // namespace m3s
