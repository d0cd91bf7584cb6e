#include "attgrasp/attributes.h"

#include <array>
#include <fstream>
#include <sstream>

namespace attgrasp {

namespace {

const std::array<const char*, 5> kColorTokens = {"red", "green", "blue", "yellow", "black"};
const std::array<const char*, 4> kShapeTokens = {"cube", "cuboid", "cylinder", "sphere"};

bool is_color_token(const std::string& t) {
  for (const char* c : kColorTokens)
    if (t == c) return true;
  return false;
}

bool is_shape_token(const std::string& t) {
  for (const char* s : kShapeTokens)
    if (t == s) return true;
  return false;
}

}  // namespace

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens_after_eos,
                                   int embedding_dim) {
  Vocabulary v;
  v.embedding_dim_ = embedding_dim;
  v.tokens_.push_back("eos");
  v.ids_["eos"] = 0;
  for (const auto& t : tokens_after_eos) {
    if (v.ids_.count(t)) throw DuplicateToken("duplicate token: " + t);
    v.ids_[t] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(t);
  }
  return v;
}

Vocabulary Vocabulary::standard(int embedding_dim) {
  return from_tokens({"red", "black", "yellow", "cylinder", "cube",
                      "green", "blue", "cuboid", "sphere"},
                     embedding_dim);
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) throw UnknownToken("unknown token: " + token);
  return it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw UnknownToken("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<size_t>(id)];
}

TokenKind Vocabulary::kind(const std::string& token) const {
  if (is_color_token(token)) return TokenKind::color;
  if (is_shape_token(token)) return TokenKind::shape;
  return TokenKind::name;
}

Vocabulary Vocabulary::extended(const std::string& token) const {
  if (ids_.count(token)) throw DuplicateToken("duplicate token: " + token);
  Vocabulary v = *this;
  v.ids_[token] = static_cast<int>(v.tokens_.size());
  v.tokens_.push_back(token);
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for write: " + path);
  for (int i = 0; i < size(); ++i) os << tokens_[static_cast<size_t>(i)] << " " << i << "\n";
}

Vocabulary Vocabulary::load(const std::string& path, int embedding_dim) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for read: " + path);
  std::vector<std::pair<std::string, int>> pairs;
  std::string tok;
  int id;
  while (is >> tok >> id) pairs.emplace_back(tok, id);
  std::vector<std::string> tokens(pairs.size());
  for (const auto& [t, i] : pairs) {
    if (i < 0 || i >= static_cast<int>(pairs.size()))
      throw IoError("non-dense vocabulary ids in " + path);
    tokens[static_cast<size_t>(i)] = t;
  }
  if (tokens.empty() || tokens[0] != "eos") throw IoError("vocabulary must start with eos: " + path);
  return from_tokens({tokens.begin() + 1, tokens.end()}, embedding_dim);
}

AttributeLabel AttributeLabel::padded(int dim) const {
  AttributeLabel out = *this;
  while (out.n() < dim) out.values.push_back(0);
  return out;
}

double similarity(const AttributeLabel& a1, const AttributeLabel& a2) {
  if (a1.n() != a2.n())
    throw DimensionMismatch("label dims differ: " + std::to_string(a1.n()) + " vs " +
                            std::to_string(a2.n()));
  if (a1.n() == 0) throw DimensionMismatch("empty labels");
  int hits = 0;
  for (int i = 0; i < a1.n(); ++i)
    if (a1.values[static_cast<size_t>(i)] == a2.values[static_cast<size_t>(i)] &&
        a1.values[static_cast<size_t>(i)] != 0)
      ++hits;
  return static_cast<double>(hits) / a1.n();
}

QueryText QueryText::parse(const std::string& text) {
  QueryText q;
  std::string cur;
  for (char ch : text) {
    if (ch == ' ' || ch == ',' || ch == '\t') {
      if (!cur.empty()) q.tokens.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) q.tokens.push_back(cur);
  return q;
}

std::string QueryText::str() const {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += " ";
    out += tokens[i];
  }
  return out;
}

AttributeLabel label_of_text(const QueryText& text, const Vocabulary& vocab, int n) {
  if (n < 2 || n > 3) throw PreconditionError("label dimension must be 2 or 3");
  if (text.tokens.empty()) throw PreconditionError("empty query text");
  AttributeLabel label(std::vector<int>(static_cast<size_t>(n), 0));
  for (const auto& tok : text.tokens) {
    int id = vocab.id(tok);  // throws UnknownToken
    int slot;
    switch (vocab.kind(tok)) {
      case TokenKind::color: slot = 0; break;
      case TokenKind::shape: slot = 1; break;
      default: slot = 2; break;
    }
    if (slot >= n) throw PreconditionError("no slot for token kind: " + tok);
    if (label.values[static_cast<size_t>(slot)] != 0)
      throw PreconditionError("slot already filled by another token: " + tok);
    label.values[static_cast<size_t>(slot)] = id;
  }
  return label;
}

QueryText text_of_label(const AttributeLabel& label, const Vocabulary& vocab) {
  QueryText q;
  if (label.n() >= 3 && label.values[2] != 0) q.tokens.push_back(vocab.token(label.values[2]));
  if (label.n() >= 1 && label.values[0] != 0) q.tokens.push_back(vocab.token(label.values[0]));
  if (label.n() >= 2 && label.values[1] != 0) q.tokens.push_back(vocab.token(label.values[1]));
  if (q.tokens.empty()) throw PreconditionError("label has no attributes to describe");
  return q;
}

}  // namespace attgrasp
