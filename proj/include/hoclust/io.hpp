#pragma once

#include <string>

#include "hoclust/models.hpp"

namespace hoclust {

// Binary tensor format ".ten": magic "TEN1", little-endian u32 d,
// u32 dims[d], f64 data in canonical (last index fastest) order.
void write_tensor(const DenseTensor& T, const std::string& path);
DenseTensor read_tensor(const std::string& path);

// JSON form {"dims": [...], "data": [...]} for small tensors.
std::string tensor_to_json(const DenseTensor& T);
DenseTensor tensor_from_json(const std::string& json_text);

// Hypergraph JSON: {"d":..., "N":..., "edges":[[v,...],...],
// "planted":{"vertices":[...], "q1":..., "q2":...}|null}. Vertex ids are
// 1-based on disk, 0-based in memory.
std::string hypergraph_to_json(const Hypergraph& G);
Hypergraph hypergraph_from_json(const std::string& json_text);
void write_hypergraph(const Hypergraph& G, const std::string& path);
Hypergraph read_hypergraph(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace hoclust
