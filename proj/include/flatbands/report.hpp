#pragma once
/*! \file
    \brief JSON serialization of results. Complex numbers become `_re`/`_im`
    field pairs; every document carries `"schema": 1`.
*/

#include <filesystem>
#include <string>

#include <json.hpp>

#include "flatbands/bands.hpp"
#include "flatbands/magic.hpp"
#include "flatbands/multiplicity.hpp"
#include "flatbands/traces.hpp"

namespace flatbands {

using Json = nlohmann::ordered_json;

inline constexpr const char* library_version = "0.1.0";
inline constexpr int schema_version = 1;

void put_complex(Json& j, const std::string& name, cplx z);

Json to_json(const MagicCandidate& c);
Json to_json(const Spacing& s);
Json to_json(const MultiplicityResult& r);
Json to_json(const ProfileEntry& e);
Json to_json(const TraceResult& r);
Json to_json(const RationalProbe& r);
Json to_json(const SumRuleReport& r);
Json to_json(const FlatBandCheck& r);
Json to_json(const OneKReport& r);
/// Summary (lowest band min/max) plus per-k energies.
Json to_json(const BandSweep& s);

Json describe_window(Model model, double radius);

/// Top-level document: schema, kind, version, status, config echo, potential
/// fingerprint and window description.
Json make_document(const std::string& kind, const Json& config, std::uint64_t fingerprint,
                   const Json& window);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace flatbands
