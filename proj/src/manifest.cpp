#include "adcad/manifest.hpp"

#include <fstream>
#include <sstream>

#include "adcad/error.hpp"

namespace adcad {

Label parse_label(const std::string& s) {
    if (s == "AD") return Label::AD;
    if (s == "HC") return Label::HC;
    throw Error(ErrorKind::UnknownLabel, "unknown label '" + s + "' (expected AD or HC)");
}

std::string to_string(Label l) { return l == Label::AD ? "AD" : "HC"; }

std::vector<Label> Manifest::labels() const {
    std::vector<Label> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.label);
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open manifest '" + path.string() + "'");

    Manifest m;
    m.location = path;
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::BadFormat, "manifest '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "subject_id,label,path,modality")
        throw Error(ErrorKind::BadFormat, "manifest '" + path.string() + "' has bad header '" + line + "'");

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 4)
            throw Error(ErrorKind::BadFormat, path.string() + ":" + std::to_string(lineno) +
                                                  ": expected 4 columns, got " +
                                                  std::to_string(cells.size()));
        m.rows.push_back({cells[0], parse_label(cells[1]), cells[2], modality_from_string(cells[3])});
    }
    return m;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write manifest '" + path.string() + "'");
    out << "subject_id,label,path,modality\n";
    for (const auto& r : m.rows)
        out << r.subject_id << ',' << to_string(r.label) << ',' << r.path.generic_string() << ','
            << to_string(r.modality) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace adcad
