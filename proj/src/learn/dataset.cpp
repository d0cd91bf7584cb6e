#include "attgrasp/learn/dataset.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "attgrasp/errors.h"
#include "attgrasp/tensor_io.h"

namespace attgrasp::learn {

namespace fs = std::filesystem;

namespace {

const char* domain_tag(Domain d) { return d == Domain::source ? "source" : "target"; }

Domain parse_domain(const std::string& s) {
  if (s == "source") return Domain::source;
  if (s == "target") return Domain::target;
  throw IoError("unknown domain tag: " + s);
}

sim::Heightmap heightmap_from(const TensorF32& rgb, const TensorF32& depth) {
  sim::Heightmap hm;
  hm.rgb = rgb.to_tensor();
  hm.depth = depth.to_tensor();
  hm.resolution = hm.rgb.rows() > 0 ? 1.0 / hm.rgb.rows() : 0.0;
  return hm;
}

}  // namespace

sim::Heightmap EpisodeRecord::heightmap_pre() const { return heightmap_from(*rgb, *depth); }

sim::Heightmap EpisodeRecord::heightmap_post() const {
  if (!success()) throw PreconditionError("record has no post-grasp image");
  return heightmap_from(*post_rgb, *post_depth);
}

EpisodeRecord make_record(int64_t id, const sim::Heightmap& pre, const Tensor& mask,
                          const QueryText& text, const sim::GraspAction& action,
                          double label_q, Domain domain, const sim::Heightmap* post) {
  EpisodeRecord r;
  r.id = id;
  r.text = text;
  r.action = action;
  r.label_q = label_q;
  r.domain = domain;
  r.rgb = std::make_shared<TensorF32>(TensorF32::from(pre.rgb));
  r.depth = std::make_shared<TensorF32>(TensorF32::from(pre.depth));
  r.mask = std::make_shared<TensorF32>(TensorF32::from(mask));
  if (post) {
    r.post_rgb = std::make_shared<TensorF32>(TensorF32::from(post->rgb));
    r.post_depth = std::make_shared<TensorF32>(TensorF32::from(post->depth));
  }
  return r;
}

EpisodeRecord her_relabel(const EpisodeRecord& record, const sim::SceneObject& grasped,
                          const Vocabulary& vocab) {
  if (!record.success())
    throw PreconditionError("hindsight relabel requires a successful grasp");
  EpisodeRecord out = record;
  out.text = text_of_label(grasped.attr_label.padded(2), vocab);
  out.label_q = 1.0;
  out.her_origin = true;
  return out;
}

void write_dataset(const std::string& dir, const std::vector<EpisodeRecord>& records) {
  fs::create_directories(fs::path(dir) / "tensors");
  std::map<const TensorF32*, std::string> written;
  int file_no = 0;
  auto put = [&](const std::shared_ptr<const TensorF32>& t,
                 const std::string& kind) -> std::string {
    auto it = written.find(t.get());
    if (it != written.end()) return it->second;
    std::ostringstream name;
    name << "tensors/" << std::setw(6) << std::setfill('0') << file_no++ << "_" << kind
         << ".f32";
    write_tensor_f32((fs::path(dir) / name.str()).string(), *t);
    written.emplace(t.get(), name.str());
    return name.str();
  };

  std::ofstream mf(fs::path(dir) / "manifest.txt", std::ios::trunc);
  if (!mf) throw IoError("cannot write manifest in " + dir);
  for (const auto& r : records) {
    std::string paths = put(r.rgb, "rgb") + "," + put(r.depth, "depth") + "," +
                        put(r.mask, "mask");
    if (r.success())
      paths += "," + put(r.post_rgb, "postrgb") + "," + put(r.post_depth, "postdepth");
    mf << r.id << "\t" << (r.text.tokens.empty() ? "-" : r.text.str()) << "\t"
       << r.action.angle_index << "," << r.action.row << "," << r.action.col << "\t"
       << std::setprecision(17) << r.label_q << "\t" << domain_tag(r.domain) << "\t"
       << paths << "\t" << (r.her_origin ? 1 : 0) << "\n";
  }
}

std::vector<EpisodeRecord> read_dataset(const std::string& dir) {
  std::ifstream mf(fs::path(dir) / "manifest.txt");
  if (!mf) throw IoError("no manifest.txt in " + dir);
  std::map<std::string, std::shared_ptr<const TensorF32>> cache;
  auto get = [&](const std::string& rel) -> std::shared_ptr<const TensorF32> {
    auto it = cache.find(rel);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<TensorF32>(read_tensor_f32((fs::path(dir) / rel).string()));
    cache.emplace(rel, t);
    return t;
  };

  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(mf, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 7) throw IoError("malformed manifest line: " + line);
    EpisodeRecord r;
    r.id = std::stoll(fields[0]);
    if (fields[1] != "-") r.text = QueryText::parse(fields[1]);
    {
      std::stringstream as(fields[2]);
      char comma;
      as >> r.action.angle_index >> comma >> r.action.row >> comma >> r.action.col;
    }
    r.label_q = std::stod(fields[3]);
    r.domain = parse_domain(fields[4]);
    std::vector<std::string> paths;
    {
      std::stringstream ps(fields[5]);
      std::string p;
      while (std::getline(ps, p, ',')) paths.push_back(p);
    }
    if (paths.size() != 3 && paths.size() != 5)
      throw IoError("unexpected path count in: " + line);
    r.rgb = get(paths[0]);
    r.depth = get(paths[1]);
    r.mask = get(paths[2]);
    if (paths.size() == 5) {
      r.post_rgb = get(paths[3]);
      r.post_depth = get(paths[4]);
    }
    r.her_origin = fields[6] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace attgrasp::learn
