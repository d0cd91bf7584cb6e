#include "attgrasp/net/checkpoint.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "attgrasp/errors.h"
#include "json.hpp"

namespace attgrasp::net {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const ModelConfig& c) {
  json j;
  j["image_size"] = c.image_size;
  j["in_channels"] = c.in_channels;
  j["embed_dim"] = c.embed_dim;
  j["token_dim"] = c.token_dim;
  j["enc1"] = c.enc1;
  j["enc2"] = c.enc2;
  j["enc3"] = c.enc3;
  j["dec_entry"] = c.dec_entry;
  j["dec_mid"] = c.dec_mid;
  j["dec_late"] = c.dec_late;
  j["dec_res_blocks"] = c.dec_res_blocks;
  j["num_angles"] = c.num_angles;
  j["text_hidden"] = c.text_hidden;
  j["dom_hidden"] = c.dom_hidden;
  j["depth_scale"] = c.depth_scale;
  j["text_mode"] = c.text_mode == TextMode::cbow     ? "cbow"
                   : c.text_mode == TextMode::attr_id ? "attr_id"
                                                      : "none";
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.image_size = j.at("image_size");
  c.in_channels = j.at("in_channels");
  c.embed_dim = j.at("embed_dim");
  c.token_dim = j.at("token_dim");
  c.enc1 = j.at("enc1");
  c.enc2 = j.at("enc2");
  c.enc3 = j.at("enc3");
  c.dec_entry = j.at("dec_entry");
  c.dec_mid = j.at("dec_mid");
  c.dec_late = j.at("dec_late");
  c.dec_res_blocks = j.at("dec_res_blocks");
  c.num_angles = j.at("num_angles");
  c.text_hidden = j.at("text_hidden");
  c.dom_hidden = j.at("dom_hidden");
  c.depth_scale = j.at("depth_scale");
  std::string tm = j.at("text_mode");
  c.text_mode = tm == "cbow" ? TextMode::cbow
                : tm == "attr_id" ? TextMode::attr_id
                                  : TextMode::none;
  return c;
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& dir,
                     const std::string& phase, const std::string& meta_json) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = "attgrasp-checkpoint-v1";
  manifest["phase"] = phase;
  manifest["config"] = config_to_json(model.config());
  manifest["vocab"] = model.vocab().tokens();
  manifest["meta"] = json::parse(meta_json);

  json params = json::array();
  std::string blob;
  for (const auto& [name, tensor] : model.params_const()) {
    json p;
    p["name"] = name;
    std::vector<int> shape;
    for (int d = 0; d < tensor->ndim(); ++d) shape.push_back(tensor->dim(d));
    p["shape"] = shape;
    params.push_back(p);
    for (int64_t i = 0; i < tensor->size(); ++i) {
      float f = static_cast<float>((*tensor)[i]);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      blob.push_back(static_cast<char>(bits & 0xff));
      blob.push_back(static_cast<char>((bits >> 8) & 0xff));
      blob.push_back(static_cast<char>((bits >> 16) & 0xff));
      blob.push_back(static_cast<char>((bits >> 24) & 0xff));
    }
  }
  manifest["params"] = params;

  std::ofstream mo(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!mo) throw IoError("cannot write manifest in " + dir);
  mo << manifest.dump(2) << "\n";
  std::ofstream bo(fs::path(dir) / "params.bin", std::ios::binary | std::ios::trunc);
  if (!bo) throw IoError("cannot write params.bin in " + dir);
  bo.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

Model load_checkpoint(const std::string& dir) {
  fs::path mp = fs::path(dir) / "manifest.json";
  if (!fs::exists(mp)) throw MissingCheckpoint("no checkpoint at " + dir);
  std::ifstream mi(mp);
  json manifest = json::parse(mi);
  if (manifest.at("format") != "attgrasp-checkpoint-v1")
    throw IoError("unknown checkpoint format in " + dir);

  ModelConfig cfg = config_from_json(manifest.at("config"));
  std::vector<std::string> tokens = manifest.at("vocab");
  if (tokens.empty() || tokens[0] != "eos") throw IoError("bad vocab in " + dir);
  Vocabulary vocab = Vocabulary::from_tokens({tokens.begin() + 1, tokens.end()},
                                             cfg.token_dim);
  Model model(cfg, vocab, /*seed=*/0);

  std::ifstream bi(fs::path(dir) / "params.bin", std::ios::binary);
  if (!bi) throw MissingCheckpoint("no params.bin at " + dir);
  std::string blob((std::istreambuf_iterator<char>(bi)), std::istreambuf_iterator<char>());

  auto params = model.params();
  const auto& plist = manifest.at("params");
  if (plist.size() != params.size())
    throw IoError("parameter count mismatch in " + dir);
  size_t off = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& pj = plist[i];
    if (pj.at("name") != params[i].name)
      throw IoError("parameter order mismatch at " + params[i].name);
    std::vector<int> shape = pj.at("shape");
    Tensor& t = *params[i].value;
    if (static_cast<int>(shape.size()) != t.ndim())
      throw IoError("parameter rank mismatch at " + params[i].name);
    for (int d = 0; d < t.ndim(); ++d)
      if (shape[static_cast<size_t>(d)] != t.dim(d))
        throw IoError("parameter shape mismatch at " + params[i].name);
    if (off + static_cast<size_t>(t.size()) * 4 > blob.size())
      throw IoError("params.bin truncated in " + dir);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(blob.data()) + off;
    for (int64_t j = 0; j < t.size(); ++j) {
      uint32_t bits = static_cast<uint32_t>(p[j * 4]) |
                      (static_cast<uint32_t>(p[j * 4 + 1]) << 8) |
                      (static_cast<uint32_t>(p[j * 4 + 2]) << 16) |
                      (static_cast<uint32_t>(p[j * 4 + 3]) << 24);
      float f;
      std::memcpy(&f, &bits, 4);
      t[j] = f;
    }
    off += static_cast<size_t>(t.size()) * 4;
  }
  if (off != blob.size()) throw IoError("params.bin size mismatch in " + dir);
  return model;
}

std::string checkpoint_phase(const std::string& dir) {
  fs::path mp = fs::path(dir) / "manifest.json";
  if (!fs::exists(mp)) throw MissingCheckpoint("no checkpoint at " + dir);
  std::ifstream mi(mp);
  json manifest = json::parse(mi);
  return manifest.at("phase");
}

}  // namespace attgrasp::net
