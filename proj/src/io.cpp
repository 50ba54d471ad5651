#include "agsp/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "agsp/errors.hpp"
#include "json.hpp"

namespace agsp {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& ex) {
    throw Error("parse error in " + path + ": " + ex.what());
  }
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw Error("write failed for " + path);
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(where + ": complex entries must be [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(where + ": matrix must be a non-empty array");
  const long rows = static_cast<long>(j.size());
  const long cols = static_cast<long>(j[0].size());
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<long>(j[r].size()) != cols)
      throw Error(where + ": ragged matrix rows");
    for (long c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j[r][c], where);
  }
  return m;
}

void expect_format(const json& j, const std::string& tag, const std::string& path) {
  if (!j.is_object()) throw Error(path + ": top level must be an object");
  if (j.value("format", std::string()) != tag)
    throw Error(path + ": expected format \"" + tag + "\"");
  if (j.value("version", 0) != 1)
    throw Error(path + ": unsupported version");
}

int require_int(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw Error(path + ": missing integer field \"" + key + "\"");
  return j[key].get<int>();
}

}  // namespace

GridHamiltonian read_instance(const std::string& path) {
  json j = load_json(path);
  expect_format(j, "agsp-instance", path);
  const int w = require_int(j, "width", path);
  const int h = require_int(j, "height", path);
  const int q = require_int(j, "q", path);
  if (!j.contains("terms") || !j["terms"].is_array())
    throw Error(path + ": missing terms array");

  std::vector<InteractionTerm> terms;
  terms.reserve(j["terms"].size());
  for (size_t t = 0; t < j["terms"].size(); ++t) {
    const json& jt = j["terms"][t];
    const std::string where = path + ": term " + std::to_string(t);
    if (!jt.is_object() || !jt.contains("sites") || !jt.contains("matrix"))
      throw Error(where + ": needs \"sites\" and \"matrix\"");
    std::vector<Site> sites;
    for (const auto& js : jt["sites"]) {
      if (!js.is_array() || js.size() != 2)
        throw Error(where + ": sites must be [x, y] pairs");
      sites.push_back({js[0].get<int>(), js[1].get<int>()});
    }
    Matrix m = matrix_from_json(jt["matrix"], where);
    try {
      terms.push_back(canonicalize_term(std::move(sites), std::move(m), q));
    } catch (const Error& ex) {
      throw Error(where + ": " + ex.what());
    }
  }
  try {
    return GridHamiltonian(w, h, q, std::move(terms));
  } catch (const Error& ex) {
    throw Error(path + ": " + ex.what());
  }
}

void write_instance(const GridHamiltonian& ham, const std::string& path) {
  json j;
  j["format"] = "agsp-instance";
  j["version"] = 1;
  j["width"] = ham.width();
  j["height"] = ham.height();
  j["q"] = ham.q();
  json terms = json::array();
  for (const auto& t : ham.terms()) {
    // Internal matrices are little-endian over the sorted sites; listing the
    // sites reversed makes the stored big-endian matrix equal the internal
    // one, so no digit permutation is needed on either side.
    json sites = json::array();
    for (auto it = t.sites.rbegin(); it != t.sites.rend(); ++it)
      sites.push_back(json::array({it->x, it->y}));
    terms.push_back(json{{"sites", std::move(sites)},
                         {"matrix", matrix_to_json(t.matrix)}});
  }
  j["terms"] = std::move(terms);
  save_json(j, path);
}

StoredMps read_mps(const std::string& path) {
  json j = load_json(path);
  expect_format(j, "agsp-mps", path);
  StoredMps out;
  out.height = require_int(j, "height", path);
  out.q = require_int(j, "q", path);
  if (!j.contains("tensors") || !j["tensors"].is_array() || j["tensors"].empty())
    throw Error(path + ": missing tensors array");
  out.mps.isometry = j.value("isometry", false);

  long left = 1;
  for (size_t i = 0; i < j["tensors"].size(); ++i) {
    const json& jt = j["tensors"][i];
    const std::string where = path + ": tensor " + std::to_string(i);
    if (!jt.is_object() || !jt.contains("dims") || !jt.contains("data"))
      throw Error(where + ": needs \"dims\" and \"data\"");
    if (!jt["dims"].is_array() || jt["dims"].size() != 3)
      throw Error(where + ": dims must be [left, phys, right]");
    std::vector<long> dims = {jt["dims"][0].get<long>(),
                              jt["dims"][1].get<long>(),
                              jt["dims"][2].get<long>()};
    if (dims[0] != left) throw Error(where + ": bond dimension mismatch");
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 0)
      throw Error(where + ": invalid dimensions");
    Tensor t(dims);
    if (static_cast<long>(jt["data"].size()) != t.size())
      throw Error(where + ": data length does not match dims");
    for (long k = 0; k < t.size(); ++k)
      t.data()[k] = complex_from_json(jt["data"][static_cast<size_t>(k)], where);
    left = dims[2];
    out.mps.tensors.push_back(std::move(t));
  }

  long col = 1;
  for (int d = 0; d < out.height; ++d) col *= out.q;
  for (int i = 0; i < out.mps.width(); ++i) {
    if (out.mps.phys_dim(i) != col)
      throw Error(path + ": physical dimension does not match q^height");
  }
  return out;
}

void write_mps(const SubspaceMps& y, int height, int q,
               const std::string& path) {
  json j;
  j["format"] = "agsp-mps";
  j["version"] = 1;
  j["width"] = y.width();
  j["height"] = height;
  j["q"] = q;
  j["isometry"] = y.isometry;
  json tensors = json::array();
  for (const auto& t : y.tensors) {
    json data = json::array();
    for (long k = 0; k < t.size(); ++k) data.push_back(complex_to_json(t.data()[k]));
    tensors.push_back(json{{"dims", json::array({t.dim(0), t.dim(1), t.dim(2)})},
                           {"data", std::move(data)}});
  }
  j["tensors"] = std::move(tensors);
  save_json(j, path);
}

void write_pauli_tsv(const PauliTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "sigma_word\ti\tj\tre\tim\n";
  out << std::setprecision(17);
  for (size_t w = 0; w < table.words.size(); ++w) {
    const std::string label = table.words[w].label();
    const Matrix& m = table.entries[w];
    for (long i = 0; i < m.rows(); ++i) {
      for (long jc = 0; jc < m.cols(); ++jc) {
        out << label << '\t' << (i + 1) << '\t' << (jc + 1) << '\t'
            << m(i, jc).real() << '\t' << m(i, jc).imag() << '\n';
      }
    }
  }
  if (!out) throw Error("write failed for " + path);
}

void write_pauli_json(const PauliTable& table, const std::string& path) {
  json j;
  j["format"] = "agsp-pauli";
  j["version"] = 1;
  j["width"] = table.width;
  j["height"] = table.height;
  j["q"] = table.q;
  j["k"] = table.k;
  j["dim"] = table.dim;
  json words = json::array();
  for (size_t w = 0; w < table.words.size(); ++w) {
    words.push_back(json{{"sigma", table.words[w].label()},
                         {"matrix", matrix_to_json(table.entries[w])}});
  }
  j["words"] = std::move(words);
  save_json(j, path);
}

}  // namespace agsp
