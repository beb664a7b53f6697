#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adcad/volume.hpp"

namespace adcad {

/// Positive class is AD (+1), negative HC (-1).
enum class Label { AD, HC };

/// Exact, case-sensitive parse of "AD" / "HC"; anything else throws UnknownLabel.
Label parse_label(const std::string& s);
std::string to_string(Label l);
inline double to_target(Label l) { return l == Label::AD ? 1.0 : -1.0; }

/// Classifier scores: strictly positive is AD; zero and below are HC.
template <typename Scalar>
Label label_from_score(Scalar f) {
    return f > Scalar(0) ? Label::AD : Label::HC;
}

struct ManifestRow {
    std::string subject_id;
    Label label;
    std::filesystem::path path;  // as written, relative to the manifest
    Modality modality;
};

struct Manifest {
    std::filesystem::path location;  // the manifest file itself
    std::vector<ManifestRow> rows;

    std::filesystem::path resolve(const ManifestRow& row) const {
        return row.path.is_absolute() ? row.path : location.parent_path() / row.path;
    }
    std::vector<Label> labels() const;
};

/// Reads a manifest CSV with header `subject_id,label,path,modality`.
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace adcad
