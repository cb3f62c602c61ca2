#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "freequiver/errors.hpp"
#include "freequiver/free_map.hpp"
#include "freequiver/product.hpp"

namespace freequiver {

using Json = nlohmann::ordered_json;

/// A definition file could be read but not interpreted. `where` is a JSON
/// pointer ("/entries/x1") and, for expression text, the character offset.
class DefinitionError : public Error {
 public:
  DefinitionError(const std::string& what, std::string where)
      : Error(what + " at " + where), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

using Definition = std::variant<Quiver, Rep, FreeMapDef, ProductSpec>;

/// Built-in quivers: "sch", "smw", "one_loop", "sch_diagonal" (loops x1 at u,
/// x2 at v) and "loops:N" (classical_embed(N)). nullopt for other names.
std::optional<Quiver> builtin_quiver(std::string_view name);

/// Top-level "kind" selects the type: quiver | rep | map | product.
Definition parse_definition(const Json& j);
/// Syntax errors become ParseError with the byte offset.
Definition parse_definition_text(std::string_view text);
/// Missing files raise Error.
Definition parse_definition_file(const std::string& path);

Quiver quiver_from_json(const Json& j, const std::string& where = "");
Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& where = "");
Complex scalar_from_json(const Json& j, const std::string& where = "");
/// Either text notation or an {op: ...} record.
Expr expr_from_json(const Json& j, const std::string& where = "");

Json quiver_to_json(const Quiver& q);
/// Rows of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
Json scalar_to_json(Complex k);
/// {op: ...} record form.
Json expr_to_json(const Expr& e);
Json rep_to_json(const Rep& x);
/// Entries are written in text notation.
Json map_to_json(const FreeMapDef& f);
Json product_to_json(const ProductSpec& spec);
Json definition_to_json(const Definition& d);

}  // namespace freequiver
