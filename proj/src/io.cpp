// Copyright 2026-present the vrsketch-retrieval project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vrsketch/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

namespace vrsketch {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write file: " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

PointCloud load_cloud_text(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<Eigen::Vector3d> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) {
      std::string trimmed = line;
      trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
      if (trimmed.empty()) continue;  // blank line
      throw LoadError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 'x y z' triple");
    }
    points.emplace_back(x, y, z);
  }
  if (points.empty()) throw LoadError(path.string() + ": no points");

  PointCloud cloud;
  cloud.points.resize(3, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) cloud.points.col(i) = points[i];
  if (!cloud.points.allFinite()) throw LoadError(path.string() + ": non-finite coordinates");
  return cloud;
}

void save_cloud_text(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (Eigen::Index i = 0; i < cloud.n_points(); ++i) {
    out << cloud.points(0, i) << " " << cloud.points(1, i) << " " << cloud.points(2, i) << "\n";
  }
}

Sketch load_sketch_json(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string() + ": JSON parse error: " + e.what());
  }
  if (!doc.contains("strokes") || !doc["strokes"].is_array()) {
    throw LoadError(path.string() + ": missing 'strokes' array");
  }

  Sketch sketch;
  for (const auto& js : doc["strokes"]) {
    Stroke stroke;
    stroke.width = js.value("width", 1.0);
    if (stroke.width <= 0.0) {
      throw LoadError(path.string() + ": stroke width must be positive");
    }
    const auto& pts = js.at("points");
    if (!pts.is_array() || pts.size() < 2) {
      throw LoadError(path.string() + ": each stroke needs at least 2 points");
    }
    stroke.points.resize(3, static_cast<Eigen::Index>(pts.size()));
    stroke.timestamps.reserve(pts.size());
    double prev_t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      if (!p.is_array() || p.size() < 4) {
        throw LoadError(path.string() + ": stroke point must be [x, y, z, t]");
      }
      stroke.points(0, i) = p[0].get<double>();
      stroke.points(1, i) = p[1].get<double>();
      stroke.points(2, i) = p[2].get<double>();
      double t = p[3].get<double>();
      if (t < prev_t) {
        throw LoadError(path.string() + ": timestamps must be non-decreasing within a stroke");
      }
      prev_t = t;
      stroke.timestamps.push_back(t);
    }
    if (!stroke.points.allFinite()) {
      throw LoadError(path.string() + ": non-finite stroke coordinates");
    }
    sketch.strokes.push_back(std::move(stroke));
  }
  if (sketch.strokes.empty()) throw LoadError(path.string() + ": sketch has no strokes");
  return sketch;
}

void save_sketch_json(const Sketch& sketch, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["strokes"] = nlohmann::json::array();
  for (const Stroke& stroke : sketch.strokes) {
    nlohmann::json js;
    js["width"] = stroke.width;
    js["points"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < stroke.points.cols(); ++i) {
      double t = i < static_cast<Eigen::Index>(stroke.timestamps.size())
                     ? stroke.timestamps[i]
                     : static_cast<double>(i);
      js["points"].push_back({stroke.points(0, i), stroke.points(1, i), stroke.points(2, i), t});
    }
    doc["strokes"].push_back(std::move(js));
  }
  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
}

ShapeMesh load_mesh_obj(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  ShapeMesh mesh;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int line_no = 0;

  auto parse_face_index = [&](const std::string& token) {
    // OBJ faces may carry v/vt/vn; only the vertex index matters here.
    std::size_t slash = token.find('/');
    std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    int idx = 0;
    try {
      idx = std::stoi(head);
    } catch (...) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": bad face index '" +
                      token + "'");
    }
    // OBJ is 1-based; negative indices reference from the end.
    if (idx > 0) return idx - 1;
    if (idx < 0) return static_cast<int>(vertices.size()) + idx;
    throw LoadError(path.string() + ":" + std::to_string(line_no) + ": face index 0 is invalid");
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw LoadError(path.string() + ":" + std::to_string(line_no) + ": bad vertex record");
      }
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ls >> token) idx.push_back(parse_face_index(token));
      if (idx.size() < 3) {
        throw LoadError(path.string() + ":" + std::to_string(line_no) +
                        ": face needs at least 3 vertices");
      }
      // Fan-triangulate polygons.
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) {
        faces.push_back({idx[0], idx[i], idx[i + 1]});
      }
    }
    // every other record type is ignored
  }
  if (vertices.empty()) throw LoadError(path.string() + ": no vertices");

  mesh.vertices.resize(3, static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) mesh.vertices.col(i) = vertices[i];
  if (!mesh.vertices.allFinite()) throw LoadError(path.string() + ": non-finite vertices");

  const int v = static_cast<int>(vertices.size());
  int dropped = 0;
  for (const auto& face : faces) {
    bool in_range = true;
    for (int idx : face) in_range = in_range && idx >= 0 && idx < v;
    if (!in_range) {
      throw LoadError(path.string() + ": face index out of range");
    }
    Eigen::Vector3d a = mesh.vertices.col(face[0]);
    Eigen::Vector3d b = mesh.vertices.col(face[1]);
    Eigen::Vector3d c = mesh.vertices.col(face[2]);
    if (0.5 * (b - a).cross(c - a).norm() > 0.0) {
      mesh.faces.push_back(face);
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) {
    log_warn(path.string() + ": dropped " + std::to_string(dropped) + " zero-area triangle(s)");
  }
  if (mesh.faces.empty()) {
    throw LoadError(path.string() + ": no non-degenerate triangles");
  }
  return mesh;
}

void save_mesh_obj(const ShapeMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (Eigen::Index i = 0; i < mesh.vertices.cols(); ++i) {
    out << "v " << mesh.vertices(0, i) << " " << mesh.vertices(1, i) << " "
        << mesh.vertices(2, i) << "\n";
  }
  for (const auto& face : mesh.faces) {
    out << "f " << face[0] + 1 << " " << face[1] + 1 << " " << face[2] + 1 << "\n";
  }
}

}  // namespace vrsketch
