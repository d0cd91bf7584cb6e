#ifndef ATTGRASP_ATTRIBUTES_H_
#define ATTGRASP_ATTRIBUTES_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "attgrasp/errors.h"

namespace attgrasp {

enum class TokenKind { color, shape, name };

// Token dictionary. Id 0 is always "eos" (the null attribute). Ids are dense
// and append-only; extending for a one-grasp name token never changes
// existing ids. Color and shape tokens are closed sets; anything else is a
// name token.
class Vocabulary {
 public:
  Vocabulary() = default;
  static Vocabulary from_tokens(const std::vector<std::string>& tokens_after_eos,
                                int embedding_dim);
  // eos, red, black, yellow, cylinder, cube, green, blue, cuboid, sphere.
  // The first six ids match the worked dictionary used by the label examples.
  static Vocabulary standard(int embedding_dim = 128);

  int id(const std::string& token) const;
  bool contains(const std::string& token) const { return ids_.count(token) > 0; }
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  int embedding_dim() const { return embedding_dim_; }
  TokenKind kind(const std::string& token) const;
  TokenKind kind_of_id(int id) const { return kind(token(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Copy with one more token appended. Throws DuplicateToken.
  Vocabulary extended(const std::string& token) const;

  void save(const std::string& path) const;  // one "token id" pair per line
  static Vocabulary load(const std::string& path, int embedding_dim);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  int embedding_dim_ = 0;
};

// Fixed-slot integer label vector; element 0 of a slot means "unspecified".
// Slot order: color, shape, then name when n = 3.
struct AttributeLabel {
  std::vector<int> values;

  AttributeLabel() = default;
  explicit AttributeLabel(std::vector<int> v) : values(std::move(v)) {}
  int n() const { return static_cast<int>(values.size()); }

  // Pads with null slots up to dim (for cross-phase comparisons; the
  // similarity denominator is the padded n).
  AttributeLabel padded(int dim) const;

  bool operator==(const AttributeLabel& o) const { return values == o.values; }
};

// (1/n) * sum_i [a1_i == a2_i != 0]. Throws DimensionMismatch on unequal n.
double similarity(const AttributeLabel& a1, const AttributeLabel& a2);

// Pre-parsed attribute keyword list. Commas and whitespace are separators.
struct QueryText {
  std::vector<std::string> tokens;

  QueryText() = default;
  explicit QueryText(std::vector<std::string> t) : tokens(std::move(t)) {}
  static QueryText parse(const std::string& text);
  std::string str() const;
  bool operator==(const QueryText& o) const { return tokens == o.tokens; }
};

// Slot-directed labeling: each token lands in the slot of its kind, whatever
// the token order. Throws UnknownToken for out-of-vocabulary tokens and
// PreconditionError if a slot is filled twice or a kind has no slot (e.g. a
// name token with n = 2).
AttributeLabel label_of_text(const QueryText& text, const Vocabulary& vocab, int n);

// Canonical text for a label: name first (paper-style "apple, red sphere"),
// then color, then shape; null slots skipped.
QueryText text_of_label(const AttributeLabel& label, const Vocabulary& vocab);

}  // namespace attgrasp

#endif  // ATTGRASP_ATTRIBUTES_H_
