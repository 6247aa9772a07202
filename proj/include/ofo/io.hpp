#pragma once

#include "ofo/linalg.hpp"
#include "ofo/plant.hpp"
#include "ofo/powergrid.hpp"
#include "ofo/sim.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <string_view>

namespace ofo::io {

using Json = nlohmann::json;

/// Shortest round-trip-safe form with 17 significant digits, '.' separator,
/// independent of the global locale. Non-finite values print as nan / inf / -inf.
std::string format_number(double value);

/// Row-major nested array -> matrix. Throws ParseError naming `key` on ragged
/// rows, non-numeric or non-finite entries.
Matrix parse_matrix(const Json& node, std::string_view key);
Vector parse_vector(const Json& node, std::string_view key);

Json to_json(const Matrix& M);
Json to_json(const Vector& v);

/// Keys "A", "B", "C", "D", "d". Dimension errors are reported as ParseError
/// naming the first key whose shape disagrees.
LtiPlant plant_from_json(const Json& node);
Json plant_to_json(const LtiPlant& plant);

grid::GridSpec grid_from_json(const Json& node);
Json grid_to_json(const grid::GridSpec& spec);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// Columns k,u_1..u_N,y_1..y_N[,x_1..x_n],rel_err_u[,combined_sq]. Rows with
/// k % decimation == 0 plus the final row are written.
std::string trajectory_csv(const Trajectory& trajectory, const ErrorMetrics& rel,
                           const ErrorMetrics* combined, std::size_t decimation = 1);

}  // namespace ofo::io
