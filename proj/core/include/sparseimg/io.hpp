#pragma once

#include <json.hpp>
#include <string>

#include "sparseimg/analysis.hpp"
#include "sparseimg/coherence.hpp"
#include "sparseimg/geometry.hpp"
#include "sparseimg/sensing.hpp"
#include "sparseimg/solver.hpp"
#include "sparseimg/wavemodel.hpp"

namespace sparseimg::io {

using json = nlohmann::json;

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// Geometry section. Lengths are in units of lambda0 when unit ==
/// "lambda0" (default) or in meters when unit == "meters", in which case
/// "wavelength_m" must be present and all lengths are divided by it.
/// Bandwidth is specified as "bandwidth_fraction" = B / omega0.
GeometryConfig geometry_config_from_json(const json& j);
json geometry_config_to_json(const GeometryConfig& config);

/// Scene format: {"sources": [{"position": [z1,z2,z3], "amplitude":
/// [re,im]}, ...]}, positions in lambda0 units.
SourceScene scene_from_json(const json& j);
json scene_to_json(const SourceScene& scene);

/// Columnar data vector: "index,real,imag" per line.
void write_data_csv(const std::string& path, const CVector& d);
CVector read_data_csv(const std::string& path);

/// Matrix export: <base>.json header (rows, cols, mode, model, geometry
/// hash, geometry section, alpha, phase_strip) plus <base>.bin holding
/// row-major complex doubles.
void save_matrix(const SensingMatrix& m, const std::string& base);
SensingMatrix load_matrix(const std::string& base);

/// Gram offset table: "dz1,dz2,dz3,modulus" rows over the offset lattice.
void write_offset_table_csv(const std::string& path, const GramKernel& kernel);

json sparse_to_json(const SparseVector& v);
SparseVector sparse_from_json(const json& j);
json result_to_json(const RecoveryResult& r);

/// Amplitude dump for plotting: index, lattice coords, position, |rho|, re, im.
void write_amplitude_csv(const std::string& path, const CVector& rho,
                         const Grid& grid);

json coherence_to_json(const CoherenceReport& r);
json interaction_to_json(const InteractionReport& r);
void write_per_point_csv(const std::string& path, const InteractionReport& r,
                         const Grid& grid);

json ball_mass_to_json(const std::vector<BallMass>& table);
void write_ball_mass_csv(const std::string& path,
                         const std::vector<BallMass>& table);

std::string hash_hex(std::uint64_t h);

}  // namespace sparseimg::io
