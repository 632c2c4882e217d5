#include "binpose/io.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

#include "binpose/rng.hpp"

namespace binpose::io {

using nlohmann::json;

std::string hash_config(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw std::runtime_error(path.string() + ": " + msg);
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line,
                            const std::string& msg) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_offset(const std::filesystem::path& path, std::size_t offset,
                              const std::string& msg) {
  throw std::runtime_error(path.string() + ": offset " + std::to_string(offset) +
                           ": " + msg);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out << content;
  if (!out) fail(path, "write failed");
}

json load_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

enum class PropKind { f32, f64, i8, u8, i16, u16, i32, u32 };

std::size_t prop_size(PropKind kind) {
  switch (kind) {
    case PropKind::f64:
      return 8;
    case PropKind::f32:
    case PropKind::i32:
    case PropKind::u32:
      return 4;
    case PropKind::i16:
    case PropKind::u16:
      return 2;
    default:
      return 1;
  }
}

bool prop_kind_from(const std::string& name, PropKind& out) {
  if (name == "float" || name == "float32") out = PropKind::f32;
  else if (name == "double" || name == "float64") out = PropKind::f64;
  else if (name == "char" || name == "int8") out = PropKind::i8;
  else if (name == "uchar" || name == "uint8") out = PropKind::u8;
  else if (name == "short" || name == "int16") out = PropKind::i16;
  else if (name == "ushort" || name == "uint16") out = PropKind::u16;
  else if (name == "int" || name == "int32") out = PropKind::i32;
  else if (name == "uint" || name == "uint32") out = PropKind::u32;
  else return false;
  return true;
}

bool is_float_kind(PropKind kind) {
  return kind == PropKind::f32 || kind == PropKind::f64;
}

enum class Role { x, y, z, instance, visibility, skip };

struct PlyProperty {
  PropKind kind = PropKind::f64;
  Role role = Role::skip;
  std::string name;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  std::size_t data_offset = 0;  // bytes into the file
  std::size_t data_line = 0;    // 1-based line the data starts on
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

PlyHeader parse_ply_header(const std::filesystem::path& path, const std::string& data) {
  PlyHeader header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_magic = false;
  bool saw_format = false;

  while (pos <= data.size()) {
    std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) fail(path, "unterminated PLY header");
    std::string line = data.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    std::size_t next = eol + 1;

    auto tokens = split_ws(line);
    if (!saw_magic) {
      if (tokens.size() != 1 || tokens[0] != "ply") fail_line(path, line_no, "not a PLY file");
      saw_magic = true;
      pos = next;
      continue;
    }
    if (tokens.empty()) fail_line(path, line_no, "empty header line");
    const std::string& kw = tokens[0];
    if (kw == "comment" || kw == "obj_info") {
      pos = next;
      continue;
    }
    if (kw == "format") {
      if (tokens.size() != 3 || tokens[2] != "1.0") fail_line(path, line_no, "bad format line");
      if (tokens[1] == "ascii") header.binary = false;
      else if (tokens[1] == "binary_little_endian") header.binary = true;
      else fail_line(path, line_no, "unsupported format " + tokens[1]);
      saw_format = true;
      pos = next;
      continue;
    }
    if (kw == "element") {
      if (tokens.size() != 3) fail_line(path, line_no, "bad element line");
      PlyElement element;
      element.name = tokens[1];
      std::size_t count = 0;
      auto res = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count);
      if (res.ec != std::errc() || res.ptr != tokens[2].data() + tokens[2].size()) {
        fail_line(path, line_no, "bad element count " + tokens[2]);
      }
      element.count = count;
      header.elements.push_back(std::move(element));
      pos = next;
      continue;
    }
    if (kw == "property") {
      if (header.elements.empty()) fail_line(path, line_no, "property before element");
      if (tokens.size() >= 2 && tokens[1] == "list") {
        std::string name = tokens.size() >= 5 ? tokens[4] : "<unnamed>";
        fail_line(path, line_no, "unsupported list property " + name);
      }
      if (tokens.size() != 3) fail_line(path, line_no, "bad property line");
      PlyProperty prop;
      prop.name = tokens[2];
      if (!prop_kind_from(tokens[1], prop.kind)) {
        fail_line(path, line_no, "unsupported type " + tokens[1] + " for property " + prop.name);
      }
      if (header.elements.back().name == "vertex") {
        if (prop.name == "x") prop.role = Role::x;
        else if (prop.name == "y") prop.role = Role::y;
        else if (prop.name == "z") prop.role = Role::z;
        else if (prop.name == "instance_id" || prop.name == "instance") prop.role = Role::instance;
        else if (prop.name == "visibility") prop.role = Role::visibility;
        if ((prop.role == Role::x || prop.role == Role::y || prop.role == Role::z ||
             prop.role == Role::visibility) &&
            !is_float_kind(prop.kind)) {
          fail_line(path, line_no, "unsupported type " + tokens[1] + " for property " + prop.name);
        }
        if (prop.role == Role::instance && is_float_kind(prop.kind)) {
          fail_line(path, line_no, "unsupported type " + tokens[1] + " for property " + prop.name);
        }
      }
      header.elements.back().props.push_back(std::move(prop));
      pos = next;
      continue;
    }
    if (kw == "end_header") {
      if (!saw_format) fail_line(path, line_no, "missing format line");
      header.data_offset = next;
      header.data_line = line_no + 1;
      return header;
    }
    fail_line(path, line_no, "unknown header keyword " + kw);
  }
  fail(path, "unterminated PLY header");
}

double read_binary_value(const char* p, PropKind kind) {
  switch (kind) {
    case PropKind::f32: {
      float v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    case PropKind::f64: {
      double v;
      std::memcpy(&v, p, 8);
      return v;
    }
    case PropKind::i8: {
      std::int8_t v;
      std::memcpy(&v, p, 1);
      return static_cast<double>(v);
    }
    case PropKind::u8: {
      std::uint8_t v;
      std::memcpy(&v, p, 1);
      return static_cast<double>(v);
    }
    case PropKind::i16: {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<double>(v);
    }
    case PropKind::u16: {
      std::uint16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<double>(v);
    }
    case PropKind::i32: {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    default: {
      std::uint32_t v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
  }
}

struct VertexLayout {
  int ix = -1, iy = -1, iz = -1, iinstance = -1, ivisibility = -1;
};

VertexLayout vertex_layout(const std::filesystem::path& path, const PlyElement& element) {
  VertexLayout layout;
  for (std::size_t i = 0; i < element.props.size(); ++i) {
    switch (element.props[i].role) {
      case Role::x:
        layout.ix = static_cast<int>(i);
        break;
      case Role::y:
        layout.iy = static_cast<int>(i);
        break;
      case Role::z:
        layout.iz = static_cast<int>(i);
        break;
      case Role::instance:
        layout.iinstance = static_cast<int>(i);
        break;
      case Role::visibility:
        layout.ivisibility = static_cast<int>(i);
        break;
      case Role::skip:
        break;
    }
  }
  if (layout.ix < 0 || layout.iy < 0 || layout.iz < 0) {
    fail(path, "vertex element lacks x/y/z properties");
  }
  return layout;
}

PointCloud read_ply(const std::filesystem::path& path, const std::string& data) {
  PlyHeader header = parse_ply_header(path, data);
  PointCloud cloud;

  if (header.binary) {
    std::size_t offset = header.data_offset;
    for (const PlyElement& element : header.elements) {
      std::size_t row_size = 0;
      for (const auto& prop : element.props) row_size += prop_size(prop.kind);
      if (element.name != "vertex") {
        offset += row_size * element.count;
        continue;
      }
      VertexLayout layout = vertex_layout(path, element);
      cloud.reserve(element.count);
      if (layout.iinstance >= 0) cloud.instance_ids.emplace();
      if (layout.ivisibility >= 0) cloud.visibility.emplace();
      std::vector<double> row(element.props.size());
      for (std::size_t r = 0; r < element.count; ++r) {
        if (offset + row_size > data.size()) {
          fail_offset(path, offset, "truncated vertex data");
        }
        const char* p = data.data() + offset;
        for (std::size_t c = 0; c < element.props.size(); ++c) {
          row[c] = read_binary_value(p, element.props[c].kind);
          p += prop_size(element.props[c].kind);
        }
        cloud.push_back(Vec3{row[layout.ix], row[layout.iy], row[layout.iz]});
        if (layout.iinstance >= 0) {
          cloud.instance_ids->push_back(static_cast<std::int32_t>(row[layout.iinstance]));
        }
        if (layout.ivisibility >= 0) {
          cloud.visibility->push_back(row[layout.ivisibility]);
        }
        offset += row_size;
      }
    }
    return cloud;
  }

  std::size_t pos = header.data_offset;
  std::size_t line_no = header.data_line - 1;
  auto next_row = [&](std::vector<std::string>& tokens) {
    while (pos < data.size()) {
      std::size_t eol = data.find('\n', pos);
      std::string line = eol == std::string::npos ? data.substr(pos)
                                                  : data.substr(pos, eol - pos);
      pos = eol == std::string::npos ? data.size() : eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tokens = split_ws(line);
      if (!tokens.empty()) return true;
    }
    return false;
  };

  std::vector<std::string> tokens;
  for (const PlyElement& element : header.elements) {
    if (element.name != "vertex") {
      for (std::size_t r = 0; r < element.count; ++r) {
        if (!next_row(tokens)) fail_line(path, line_no, "truncated element " + element.name);
      }
      continue;
    }
    VertexLayout layout = vertex_layout(path, element);
    cloud.reserve(element.count);
    if (layout.iinstance >= 0) cloud.instance_ids.emplace();
    if (layout.ivisibility >= 0) cloud.visibility.emplace();
    std::vector<double> row(element.props.size());
    for (std::size_t r = 0; r < element.count; ++r) {
      if (!next_row(tokens)) fail_line(path, line_no, "truncated vertex data");
      if (tokens.size() != element.props.size()) {
        fail_line(path, line_no, "expected " + std::to_string(element.props.size()) +
                                     " values, got " + std::to_string(tokens.size()));
      }
      for (std::size_t c = 0; c < tokens.size(); ++c) {
        double value = 0.0;
        auto res = std::from_chars(tokens[c].data(), tokens[c].data() + tokens[c].size(), value);
        if (res.ec != std::errc() || res.ptr != tokens[c].data() + tokens[c].size()) {
          fail_line(path, line_no, "bad number " + tokens[c]);
        }
        row[c] = value;
      }
      cloud.push_back(Vec3{row[layout.ix], row[layout.iy], row[layout.iz]});
      if (layout.iinstance >= 0) {
        cloud.instance_ids->push_back(static_cast<std::int32_t>(row[layout.iinstance]));
      }
      if (layout.ivisibility >= 0) {
        cloud.visibility->push_back(row[layout.ivisibility]);
      }
    }
  }
  return cloud;
}

PointCloud read_xyz(const std::filesystem::path& path, const std::string& data) {
  PointCloud cloud;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    std::size_t eol = data.find('\n', pos);
    std::string line = eol == std::string::npos ? data.substr(pos)
                                                : data.substr(pos, eol - pos);
    pos = eol == std::string::npos ? data.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 3) {
      fail_line(path, line_no, "expected 3 values, got " + std::to_string(tokens.size()));
    }
    double v[3];
    for (int c = 0; c < 3; ++c) {
      auto res = std::from_chars(tokens[c].data(), tokens[c].data() + tokens[c].size(), v[c]);
      if (res.ec != std::errc() || res.ptr != tokens[c].data() + tokens[c].size()) {
        fail_line(path, line_no, "bad number " + tokens[c]);
      }
    }
    cloud.push_back(Vec3{v[0], v[1], v[2]});
  }
  return cloud;
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected 3-vector");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json rot_json(const Rot3& r) {
  json out = json::array();
  for (double v : r.m) out.push_back(v);
  return out;
}

Rot3 rot_from(const json& j) {
  if (!j.is_array() || j.size() != 9) throw std::runtime_error("expected 9-element rotation");
  Rot3 r;
  for (std::size_t i = 0; i < 9; ++i) r.m[i] = j[i].get<double>();
  return r;
}

json pose_json(const RigidPose& pose) {
  return json{{"R", rot_json(pose.rotation)}, {"t", vec3_json(pose.translation)}};
}

RigidPose pose_from(const json& j) {
  return RigidPose{rot_from(j.at("R")), vec3_from(j.at("t"))};
}

void add_provenance(json& j, const Provenance& provenance) {
  j["config_hash"] = provenance.config_hash;
  j["seed"] = provenance.seed;
}

}  // namespace

PointCloud load_point_cloud(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  PointCloud cloud =
      path.extension() == ".ply" ? read_ply(path, data) : read_xyz(path, data);
  try {
    cloud.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return cloud;
}

void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                       const Provenance& provenance) {
  cloud.validate();
  std::string out;
  out += "ply\nformat ascii 1.0\n";
  out += "comment config_hash " + provenance.config_hash + "\n";
  out += "comment seed " + std::to_string(provenance.seed) + "\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (cloud.instance_ids) out += "property int instance_id\n";
  if (cloud.visibility) out += "property double visibility\n";
  out += "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out += format_double(cloud.x[i]);
    out += ' ';
    out += format_double(cloud.y[i]);
    out += ' ';
    out += format_double(cloud.z[i]);
    if (cloud.instance_ids) {
      out += ' ';
      out += std::to_string((*cloud.instance_ids)[i]);
    }
    if (cloud.visibility) {
      out += ' ';
      out += format_double((*cloud.visibility)[i]);
    }
    out += '\n';
  }
  write_file(path, out);
}

ObjectModel load_object_spec(const std::string& ref) {
  if (ref.rfind("zoo:", 0) == 0) return zoo_object(ref.substr(4));
  const std::filesystem::path path(ref);
  const json j = load_json(path);
  try {
    const std::string id = j.at("id").get<std::string>();
    const std::string points_ref = j.at("model_points").get<std::string>();
    PointCloud cloud = load_point_cloud(
        path.has_parent_path() ? path.parent_path() / points_ref
                               : std::filesystem::path(points_ref));

    const json& js = j.at("symmetry");
    SymmetrySpec spec;
    const std::string cls = js.at("class").get<std::string>();
    auto parsed = symmetry_class_from_string(cls);
    if (!parsed) fail(path, "unknown symmetry class " + cls);
    spec.symmetry_class = *parsed;
    if (js.contains("rotation_axis")) spec.rotation_axis = vec3_from(js.at("rotation_axis"));
    if (js.contains("mirror_plane_axes")) {
      const json& axes = js.at("mirror_plane_axes");
      if (!axes.is_array() || axes.size() != 2) fail(path, "mirror_plane_axes needs 2 vectors");
      spec.mirror_plane_axes = {vec3_from(axes[0]), vec3_from(axes[1])};
    }
    if (js.contains("group")) {
      spec.group.clear();
      for (const json& g : js.at("group")) spec.group.push_back(rot_from(g));
    }
    return make_object_model(id, cloud, spec);
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

void write_keypoints(const std::filesystem::path& path, const std::string& object_id,
                     const KeypointSet& keypoints, const Provenance& provenance) {
  json j;
  j["object"] = object_id;
  add_provenance(j, provenance);
  json kp = json::array();
  for (const Vec3& k : keypoints.keypoints) kp.push_back(vec3_json(k));
  j["keypoints"] = std::move(kp);
  json eq = json::array();
  for (const auto& set : keypoints.equivalents) {
    json one = json::array();
    for (const Vec3& e : set) one.push_back(vec3_json(e));
    eq.push_back(std::move(one));
  }
  j["equivalents"] = std::move(eq);
  write_file(path, j.dump(2) + "\n");
}

KeypointSet read_keypoints(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    KeypointSet set;
    for (const json& k : j.at("keypoints")) set.keypoints.push_back(vec3_from(k));
    for (const json& group : j.at("equivalents")) {
      std::vector<Vec3> one;
      for (const json& e : group) one.push_back(vec3_from(e));
      set.equivalents.push_back(std::move(one));
    }
    if (set.keypoints.size() != set.equivalents.size()) {
      fail(path, "keypoints and equivalents disagree");
    }
    return set;
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

void write_scene(const std::filesystem::path& ply_path,
                 const std::filesystem::path& json_path, const Scene& scene,
                 const std::string& object_id, const Provenance& provenance) {
  write_point_cloud(ply_path, scene.cloud, provenance);
  json j;
  j["object"] = object_id;
  add_provenance(j, provenance);
  j["scene_seed"] = scene.seed;
  j["bin"] = json{{"min", vec3_json(scene.bin.min_corner)},
                  {"max", vec3_json(scene.bin.max_corner)}};
  json poses = json::array();
  for (const RigidPose& pose : scene.poses) poses.push_back(pose_json(pose));
  j["poses"] = std::move(poses);
  j["visibility"] = scene.visibility;
  write_file(json_path, j.dump(2) + "\n");
}

Scene read_scene(const std::filesystem::path& ply_path,
                 const std::filesystem::path& json_path) {
  Scene scene;
  scene.cloud = load_point_cloud(ply_path);
  const json j = load_json(json_path);
  try {
    scene.seed = j.at("scene_seed").get<std::uint64_t>();
    scene.bin.min_corner = vec3_from(j.at("bin").at("min"));
    scene.bin.max_corner = vec3_from(j.at("bin").at("max"));
    for (const json& p : j.at("poses")) scene.poses.push_back(pose_from(p));
    scene.visibility = j.at("visibility").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(json_path, e.what());
  }
  if (scene.visibility.size() != scene.poses.size()) {
    fail(json_path, "poses and visibility disagree");
  }
  return scene;
}

void write_estimates(const std::filesystem::path& path,
                     const std::vector<PoseEstimate>& estimates,
                     const std::string& object_id, const std::string& scene_ref,
                     const Provenance& provenance) {
  json j;
  j["object"] = object_id;
  j["scene"] = scene_ref;
  add_provenance(j, provenance);
  json list = json::array();
  for (const PoseEstimate& est : estimates) {
    json e = pose_json(est.pose);
    e["confidence"] = est.confidence;
    e["members"] = est.instance.members;
    list.push_back(std::move(e));
  }
  j["estimates"] = std::move(list);
  write_file(path, j.dump(2) + "\n");
}

std::vector<PoseEstimate> read_estimates(const std::filesystem::path& path) {
  const json j = load_json(path);
  std::vector<PoseEstimate> out;
  try {
    for (const json& e : j.at("estimates")) {
      PoseEstimate est;
      est.pose = pose_from(e);
      est.confidence = e.at("confidence").get<double>();
      est.instance.members = e.at("members").get<std::vector<std::uint32_t>>();
      est.instance.confidence = est.confidence;
      out.push_back(std::move(est));
    }
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
  return out;
}

void write_pseudo_labels(const std::filesystem::path& path, const PseudoLabelSet& labels,
                         const Provenance& provenance) {
  json j;
  add_provenance(j, provenance);
  j["n_points"] = labels.n_points;
  j["n_k"] = labels.n_k;
  j["mask"] = labels.mask;
  j["instance_of"] = labels.instance_of;
  json list = json::array();
  for (const auto& inst : labels.instances) {
    json e;
    e["members"] = inst.members;
    e["pose"] = pose_json(inst.pose);
    e["visibility"] = inst.visibility;
    json eq = json::array();
    for (const auto& set : inst.keypoint_equivalents) {
      json one = json::array();
      for (const Vec3& k : set) one.push_back(vec3_json(k));
      eq.push_back(std::move(one));
    }
    e["keypoint_equivalents"] = std::move(eq);
    list.push_back(std::move(e));
  }
  j["instances"] = std::move(list);
  write_file(path, j.dump(2) + "\n");
}

PseudoLabelSet read_pseudo_labels(const std::filesystem::path& path) {
  const json j = load_json(path);
  PseudoLabelSet labels;
  try {
    labels.n_points = j.at("n_points").get<std::size_t>();
    labels.n_k = j.at("n_k").get<std::size_t>();
    labels.mask = j.at("mask").get<std::vector<std::uint8_t>>();
    labels.instance_of = j.at("instance_of").get<std::vector<std::int32_t>>();
    for (const json& e : j.at("instances")) {
      PseudoLabelSet::InstanceLabels inst;
      inst.members = e.at("members").get<std::vector<std::uint32_t>>();
      inst.pose = pose_from(e.at("pose"));
      inst.visibility = e.at("visibility").get<double>();
      for (const json& set : e.at("keypoint_equivalents")) {
        std::vector<Vec3> one;
        for (const json& k : set) one.push_back(vec3_from(k));
        inst.keypoint_equivalents.push_back(std::move(one));
      }
      labels.instances.push_back(std::move(inst));
    }
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
  return labels;
}

void write_metrics(const std::filesystem::path& path, const MetricsReport& report,
                   const Provenance& provenance) {
  json j;
  j["object"] = report.object_id;
  add_provenance(j, provenance);
  j["ap"] = report.ap;
  j["eligible"] = report.eligible;
  j["true_positives"] = report.true_positives;
  j["false_positives"] = report.false_positives;
  j["ignored"] = report.ignored;
  j["threshold_frac"] = report.threshold_frac;
  j["min_visibility"] = report.min_visibility;
  write_file(path, j.dump(2) + "\n");
}

void write_pr_csv(const std::filesystem::path& path, const PRCurve& curve) {
  std::string out = "recall,precision\n";
  for (std::size_t i = 0; i < curve.recall.size(); ++i) {
    out += format_double(curve.recall[i]);
    out += ',';
    out += format_double(curve.precision[i]);
    out += '\n';
  }
  write_file(path, out);
}

void write_rounds_csv(const std::filesystem::path& path, const std::vector<RoundRow>& rows) {
  std::string out = "round,estimates,accepted,mean_d,mean_threshold,ap\n";
  for (const RoundRow& row : rows) {
    out += std::to_string(row.report.round);
    out += ',';
    out += std::to_string(row.report.estimates);
    out += ',';
    out += std::to_string(row.report.accepted);
    out += ',';
    out += format_double(row.report.mean_d);
    out += ',';
    out += format_double(row.report.mean_threshold);
    out += ',';
    out += format_double(row.ap);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace binpose::io
