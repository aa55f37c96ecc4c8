#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "synclab/annulus.hpp"
#include "synclab/certifier.hpp"
#include "synclab/linear.hpp"
#include "synclab/product.hpp"
#include "synclab/sync.hpp"
#include "synclab/systems.hpp"

namespace synclab {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "synclab 0.1.0";

Json load_json_file(const std::filesystem::path& path);

// {"system":"polar","mu":...,"beta_coeff":...} | {"system":"henon","a":...,"b":...}
// | {"system":"lorenz","sigma":...,"r":...,"b":...}
// | {"system":"linear","matrix":[[...]],"kind":"map"|"flow"}
System system_from_json(const Json& j);

// The polar variant of the same record; other systems are rejected.
PlanarPolarMap polar_from_json(const Json& j);

// Planar view used by the annulus and certificate commands: polar (with
// inverse) or henon (forward-only).
PlanarMap planar_map_from_json(const Json& j);

// {"transform":[[...]],"offset":[...],"drive":[...]} or {"rotation":phi}.
ProductStructure structure_from_json(const Json& j);
Json structure_to_json(const ProductStructure& s);

Mat mat_from_json(const Json& j);
Json mat_to_json(const Mat& m);
Vec vec_from_json(const Json& j);

TrialConfig trial_from_json(const Json& j, std::size_t response_dim);

// {"kind":"constant","value":[...]} | {"kind":"iid","half_width":...}
// | {"kind":"sinusoid","amp":...,"freq":...}
DriveSequence drive_from_json(const Json& j, std::size_t drive_dim,
                              std::uint64_t seed);

Json to_json(const SyncVerdict& v);
Json to_json(const LinearSyncReport& r);
Json to_json(const DensityResult& r);
Json to_json(const WindowResult& w);
Json to_json(const ConditionIEvidence& e);
Json to_json(const TypeReport& r);
Json to_json(const ConditionRReport& r);
Json to_json(const FixedPointCertificate& c);
Json to_json(const SweepReport& r);

}  // namespace synclab
