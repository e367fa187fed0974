// Artifact identity embedded into every provenance envelope.
#pragma once

namespace qcorr {

inline constexpr const char* artifact_name = "qcorr";
inline constexpr const char* artifact_version = "0.1.0";

} // namespace qcorr
