#include "pqc/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pqc {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

json record_to_json(const WaveformRecord& r) {
  json j;
  j["id"] = r.id;
  j["samples_per_cycle"] = r.samples_per_cycle;
  j["n_cycles"] = r.n_cycles;
  j["label"] = r.label ? json(to_string(*r.label)) : json(nullptr);
  j["base_peak"] = r.base_peak ? json(*r.base_peak) : json(nullptr);
  if (r.padded_from_cycles) j["padded_from_cycles"] = *r.padded_from_cycles;
  for (int p = 0; p < 3; ++p) {
    const VectorXd& v = r.channel(p);
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    j[p == 0 ? "va" : (p == 1 ? "vb" : "vc")] = std::move(arr);
  }
  return j;
}

WaveformRecord record_from_json(const json& j) {
  WaveformRecord r;
  r.id = j.at("id").get<std::string>();
  r.samples_per_cycle = j.at("samples_per_cycle").get<int>();
  r.n_cycles = j.at("n_cycles").get<int>();
  if (j.contains("label") && !j.at("label").is_null()) {
    const auto s = j.at("label").get<std::string>();
    const auto label = label_from_string(s);
    if (!label) throw std::runtime_error("unknown label '" + s + "'");
    r.label = label;
  }
  if (j.contains("base_peak") && !j.at("base_peak").is_null())
    r.base_peak = j.at("base_peak").get<double>();
  if (j.contains("padded_from_cycles") && !j.at("padded_from_cycles").is_null())
    r.padded_from_cycles = j.at("padded_from_cycles").get<int>();
  for (int p = 0; p < 3; ++p) {
    const json& arr = j.at(p == 0 ? "va" : (p == 1 ? "vb" : "vc"));
    VectorXd v(static_cast<Index>(arr.size()));
    Index i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    r.channel(p) = std::move(v);
  }
  validate(r);
  return r;
}

}  // namespace

Dataset read_dataset_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  Dataset out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (j.contains("split") && !j.contains("id")) {
        DatasetSplit s;
        s.train_ids = j.at("split").at("train").get<std::vector<std::string>>();
        s.val_ids = j.at("split").at("val").get<std::vector<std::string>>();
        s.test_ids = j.at("split").at("test").get<std::vector<std::string>>();
        out.split = std::move(s);
      } else {
        out.records.push_back(record_from_json(j));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return out;
}

void write_dataset_jsonl(const Dataset& dataset, const std::string& path) {
  std::ofstream out = open_out(path);
  for (const WaveformRecord& r : dataset.records)
    out << record_to_json(r).dump() << '\n';
  if (dataset.split)
    out << json{{"split",
                 {{"train", dataset.split->train_ids},
                  {"val", dataset.split->val_ids},
                  {"test", dataset.split->test_ids}}}}
               .dump()
        << '\n';
}

std::string format_double(double v) {
  // json's double serializer emits the shortest decimal that round-trips.
  return json(v).dump();
}

void write_features_csv(const std::string& path,
                        const std::vector<std::string>& ids, const MatrixXd& x) {
  if (static_cast<Index>(ids.size()) != x.rows())
    throw std::invalid_argument("write_features_csv: id/row count mismatch");
  std::ofstream out = open_out(path);
  out << "id";
  for (Index j = 0; j < x.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Index j = 0; j < x.cols(); ++j) out << ',' << format_double(x(i, j));
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::runtime_error("bad numeric field '" + s + "'");
  return v;
}

}  // namespace

std::pair<std::vector<std::string>, MatrixXd> read_features_csv(
    const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty features file");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "id")
    throw std::runtime_error(path + ": expected 'id' header column");
  const std::size_t dim = header.size() - 1;

  std::vector<std::string> ids;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != dim + 1)
      throw std::runtime_error(path + ": ragged row");
    ids.push_back(std::move(fields[0]));
    for (std::size_t j = 1; j < fields.size(); ++j)
      values.push_back(parse_double(fields[j]));
  }
  MatrixXd x(static_cast<Index>(ids.size()), static_cast<Index>(dim));
  std::memcpy(x.data(), values.data(), values.size() * sizeof(double));
  return {std::move(ids), std::move(x)};
}

void write_assignments_csv(const std::string& path,
                           const std::vector<std::string>& ids,
                           const std::vector<int>& assignments) {
  if (ids.size() != assignments.size())
    throw std::invalid_argument("write_assignments_csv: size mismatch");
  std::ofstream out = open_out(path);
  out << "id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ',' << assignments[i] << '\n';
}

std::pair<std::vector<std::string>, std::vector<int>> read_assignments_csv(
    const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"id", "cluster"})
    throw std::runtime_error(path + ": expected 'id,cluster' header");
  std::vector<std::string> ids;
  std::vector<int> assignments;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) throw std::runtime_error(path + ": ragged row");
    ids.push_back(std::move(fields[0]));
    assignments.push_back(static_cast<int>(parse_double(fields[1])));
  }
  return {std::move(ids), std::move(assignments)};
}

BlobArray BlobArray::from(const std::string& name, std::vector<Index> shape,
                          const float* data, Index count) {
  BlobArray a{name, std::move(shape), "f32", {}};
  a.bytes.resize(static_cast<std::size_t>(count) * sizeof(float));
  std::memcpy(a.bytes.data(), data, a.bytes.size());
  return a;
}

BlobArray BlobArray::from(const std::string& name, std::vector<Index> shape,
                          const double* data, Index count) {
  BlobArray a{name, std::move(shape), "f64", {}};
  a.bytes.resize(static_cast<std::size_t>(count) * sizeof(double));
  std::memcpy(a.bytes.data(), data, a.bytes.size());
  return a;
}

Index BlobArray::count() const {
  Index n = 1;
  for (Index d : shape) n *= d;
  return n;
}

void BlobArray::to(float* out, Index n) const {
  if (dtype != "f32" || n != count() ||
      bytes.size() != static_cast<std::size_t>(n) * sizeof(float))
    throw std::runtime_error("array '" + name + "': dtype/shape mismatch");
  std::memcpy(out, bytes.data(), bytes.size());
}

void BlobArray::to(double* out, Index n) const {
  if (dtype != "f64" || n != count() ||
      bytes.size() != static_cast<std::size_t>(n) * sizeof(double))
    throw std::runtime_error("array '" + name + "': dtype/shape mismatch");
  std::memcpy(out, bytes.data(), bytes.size());
}

void write_container(const std::string& path, json header,
                     const std::vector<BlobArray>& arrays) {
  json decl = json::array();
  for (const BlobArray& a : arrays)
    decl.push_back({{"name", a.name}, {"shape", a.shape}, {"dtype", a.dtype}});
  header["arrays"] = std::move(decl);

  const std::string text = header.dump();
  const auto len = static_cast<std::uint32_t>(text.size());
  unsigned char len_le[4] = {
      static_cast<unsigned char>(len & 0xFF),
      static_cast<unsigned char>((len >> 8) & 0xFF),
      static_cast<unsigned char>((len >> 16) & 0xFF),
      static_cast<unsigned char>((len >> 24) & 0xFF)};

  std::ofstream out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(len_le), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const BlobArray& a : arrays)
    out.write(reinterpret_cast<const char*>(a.bytes.data()),
              static_cast<std::streamsize>(a.bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<json, std::vector<BlobArray>> read_container(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  unsigned char len_le[4];
  if (!in.read(reinterpret_cast<char*>(len_le), 4))
    throw std::runtime_error(path + ": truncated header length");
  const std::uint32_t len = static_cast<std::uint32_t>(len_le[0]) |
                            (static_cast<std::uint32_t>(len_le[1]) << 8) |
                            (static_cast<std::uint32_t>(len_le[2]) << 16) |
                            (static_cast<std::uint32_t>(len_le[3]) << 24);
  std::string text(len, '\0');
  if (!in.read(text.data(), len))
    throw std::runtime_error(path + ": truncated header");
  json header = json::parse(text);

  std::vector<BlobArray> arrays;
  for (const json& d : header.at("arrays")) {
    BlobArray a;
    a.name = d.at("name").get<std::string>();
    a.shape = d.at("shape").get<std::vector<Index>>();
    a.dtype = d.at("dtype").get<std::string>();
    const std::size_t elem = a.dtype == "f64" ? 8 : 4;
    if (a.dtype != "f32" && a.dtype != "f64")
      throw std::runtime_error(path + ": unknown dtype '" + a.dtype + "'");
    a.bytes.resize(static_cast<std::size_t>(a.count()) * elem);
    if (!in.read(reinterpret_cast<char*>(a.bytes.data()),
                 static_cast<std::streamsize>(a.bytes.size())))
      throw std::runtime_error(path + ": truncated array '" + a.name + "'");
    arrays.push_back(std::move(a));
  }
  return {std::move(header), std::move(arrays)};
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace pqc
