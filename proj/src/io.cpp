#include "delaybt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dbt {

void write_matrix_market(const Eigen::MatrixXd& m, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", m(r, c));
      out << buf;
    }
  if (!out) throw IoError("write failure: " + path.string());
}

Eigen::MatrixXd read_matrix_market(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing artifact: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw IoError("not a MatrixMarket file: " + path.string());
  if (line.find("array") == std::string::npos || line.find("real") == std::string::npos)
    throw IoError("unsupported MatrixMarket header in " + path.string());
  do {
    if (!std::getline(in, line)) throw IoError("truncated MatrixMarket file: " + path.string());
  } while (!line.empty() && line[0] == '%');
  std::istringstream dims(line);
  Eigen::Index rows = 0, cols = 0;
  if (!(dims >> rows >> cols) || rows <= 0 || cols <= 0)
    throw IoError("bad MatrixMarket size line in " + path.string());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      if (!(in >> m(r, c))) throw IoError("truncated MatrixMarket data in " + path.string());
  return m;
}

void save_system(const DelaySystem& sys, const fs::path& manifest_path) {
  const fs::path dir = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
  const std::string stem = manifest_path.stem().string();

  auto emit = [&](const std::string& role, const Eigen::MatrixXd& m) {
    const std::string fname = stem + "." + role + ".mtx";
    write_matrix_market(m, dir / fname);
    return fname;
  };

  json j;
  j["kind"] = to_string(sys.kind);
  j["d"] = sys.dim();
  j["n"] = sys.n_controls();
  j["k"] = sys.n_init();
  j["m"] = sys.n_outputs();
  j["files"] = {{"A", emit("A", sys.A)},
                {"B", emit("B", sys.B)},
                {"B_in", emit("B_in", sys.B_in)},
                {"C", emit("C", sys.C)}};
  j["delays"] = json::array();
  for (size_t i = 0; i < sys.delays.size(); ++i) {
    j["delays"].push_back({{"tau", sys.delays[i].tau},
                           {"matrix_file", emit("N" + std::to_string(i), sys.delays[i].N)}});
  }

  std::ofstream out(manifest_path);
  if (!out) throw IoError("cannot open for writing: " + manifest_path.string());
  out << j.dump(2) << "\n";
}

DelaySystem load_system(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("missing manifest: " + manifest_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  const fs::path dir = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();

  DelaySystem sys;
  try {
    sys.kind = kind_from_string(j.at("kind").get<std::string>());
    const auto d = j.at("d").get<Eigen::Index>();
    const auto n = j.at("n").get<Eigen::Index>();
    const auto k = j.at("k").get<Eigen::Index>();
    const auto m = j.at("m").get<Eigen::Index>();
    const auto& files = j.at("files");
    sys.A = read_matrix_market(dir / files.at("A").get<std::string>());
    sys.B = read_matrix_market(dir / files.at("B").get<std::string>());
    sys.B_in = read_matrix_market(dir / files.at("B_in").get<std::string>());
    sys.C = read_matrix_market(dir / files.at("C").get<std::string>());
    if (sys.A.rows() != d || sys.A.cols() != d || sys.B.cols() != n ||
        sys.B_in.cols() != k || sys.C.rows() != m)
      throw IoError("manifest/matrix dimension conflict in " + manifest_path.string());
    for (const auto& del : j.at("delays")) {
      DelayTerm t;
      t.tau = del.at("tau").get<double>();
      t.N = read_matrix_market(dir / del.at("matrix_file").get<std::string>());
      sys.delays.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  return sys;
}

}  // namespace dbt
