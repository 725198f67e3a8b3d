#include "ioclqr/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ioclqr {

namespace {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::invalid_argument(std::string(what) +
                                ": expected a nested row array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument(std::string(what) + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " +
                                e.what());
  }
  return j;
}

}  // namespace

void save_trajectory(const std::filesystem::path& path, const MatrixTraj& traj) {
  json j;
  j["t0"] = traj.grid().t0;
  j["tf"] = traj.grid().tf;
  j["rows"] = traj.rows();
  j["cols"] = traj.cols();
  json samples = json::array();
  for (int i = 0; i < traj.n_nodes(); ++i) {
    const Mat& s = traj.sample(i);
    json flat = json::array();
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.cols(); ++c) flat.push_back(s(r, c));
    }
    samples.push_back(std::move(flat));
  }
  j["samples"] = std::move(samples);
  atomic_write(path, j.dump());
}

MatrixTraj load_trajectory(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    const double t0 = j.at("t0").get<double>();
    const double tf = j.at("tf").get<double>();
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const json& samples = j.at("samples");
    if (!samples.is_array() || samples.size() < 2) {
      throw std::invalid_argument("trajectory needs at least two samples");
    }
    std::vector<Mat> mats;
    mats.reserve(samples.size());
    for (const json& flat : samples) {
      if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
        throw std::invalid_argument("sample length mismatch");
      }
      Mat m(rows, cols);
      Eigen::Index k = 0;
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat.at(k++).get<double>();
      }
      mats.push_back(std::move(m));
    }
    const int n_steps = static_cast<int>(mats.size()) - 1;
    return MatrixTraj(TimeGrid(t0, tf, n_steps), std::move(mats));
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed trajectory file " + path.string() +
                                ": " + e.what());
  }
}

void save_problem(const std::filesystem::path& path, const LqrProblem& problem) {
  json j;
  j["A"] = matrix_to_json(problem.A);
  j["B"] = matrix_to_json(problem.B);
  j["Q"] = matrix_to_json(problem.Q);
  j["R"] = matrix_to_json(problem.R);
  j["F"] = matrix_to_json(problem.F);
  j["t0"] = problem.grid.t0;
  j["tf"] = problem.grid.tf;
  j["n_steps"] = problem.grid.n_steps;
  atomic_write(path, j.dump());
}

LqrProblem load_problem(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    return LqrProblem(matrix_from_json(j.at("A"), "A"),
                      matrix_from_json(j.at("B"), "B"),
                      matrix_from_json(j.at("Q"), "Q"),
                      matrix_from_json(j.at("R"), "R"),
                      matrix_from_json(j.at("F"), "F"),
                      TimeGrid(j.at("t0").get<double>(), j.at("tf").get<double>(),
                               j.at("n_steps").get<int>()));
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed problem file " + path.string() +
                                ": " + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const Mat& m) {
  atomic_write(path, matrix_to_json(m).dump());
}

Mat load_matrix(const std::filesystem::path& path) {
  return matrix_from_json(parse_file(path), path.string().c_str());
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open " + path.string());
  }
  std::uint64_t hash = 1469598103934665603ULL;  // FNV offset basis
  char ch;
  while (in.get(ch)) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 1099511628211ULL;  // FNV prime
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

}  // namespace ioclqr
