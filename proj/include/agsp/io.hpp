#pragma once

#include <string>

#include "agsp/grid_hamiltonian.hpp"
#include "agsp/mps.hpp"
#include "agsp/pauli.hpp"

namespace agsp {

/// Reads a grid instance from JSON.  Term matrices on disk are big-endian
/// over the listed site order (first listed site = most significant digit)
/// and are canonicalized on load.  Throws Error with a parse diagnostic on
/// malformed input.
GridHamiltonian read_instance(const std::string& path);

/// Writes an instance in the JSON format accepted by read_instance.
void write_instance(const GridHamiltonian& ham, const std::string& path);

/// A subspace together with the lattice metadata needed to interpret its
/// column physical index as a stack of qudits.
struct StoredMps {
  SubspaceMps mps;
  int height = 0;
  int q = 0;
};

/// Reads a subspace MPS written by write_mps; validates format and version.
StoredMps read_mps(const std::string& path);

/// Writes the subspace and its lattice metadata as versioned JSON.
void write_mps(const SubspaceMps& y, int height, int q,
               const std::string& path);

/// Tab-separated expectation table: columns sigma_word, i, j, re, im with
/// 1-based basis indices, one row per entry, words in table order.
void write_pauli_tsv(const PauliTable& table, const std::string& path);

/// Structured JSON export of the same table.
void write_pauli_json(const PauliTable& table, const std::string& path);

}  // namespace agsp
