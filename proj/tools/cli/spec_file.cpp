#include "spec_file.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <sstream>

namespace tfc::cli {

namespace {

using nlohmann::json;

struct Ctx {
  std::string source;

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw SpecError(source + ": " + (path.empty() ? "/" : path) + ": " + what);
  }

  const json& field(const json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail("/" + key, "missing required field");
    return obj.at(key);
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "non-finite number");
    return x;
  }

  Matrix matrix(const json& v, int d, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected a matrix (flat row-major array or array of rows)");
    Matrix m(d, d);
    if (v.size() == static_cast<std::size_t>(d) * static_cast<std::size_t>(d) && (v.empty() || !v[0].is_array())) {
      for (int i = 0; i < d * d; ++i) m(i / d, i % d) = number(v[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
      return m;
    }
    if (v.size() != static_cast<std::size_t>(d)) fail(path, "expected " + std::to_string(d * d) + " entries or " + std::to_string(d) + " rows");
    for (int r = 0; r < d; ++r) {
      const auto& row = v[static_cast<std::size_t>(r)];
      const std::string rp = path + "/" + std::to_string(r);
      if (!row.is_array() || row.size() != static_cast<std::size_t>(d)) fail(rp, "expected a row of " + std::to_string(d) + " numbers");
      for (int col = 0; col < d; ++col) m(r, col) = number(row[static_cast<std::size_t>(col)], rp + "/" + std::to_string(col));
    }
    return m;
  }
};

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedSpec parse_spec_text(const std::string& text, const std::string& source) {
  const Ctx ctx{source};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw SpecError(source + ":" + line_col(text, byte) + ": " + (pos == std::string::npos ? what : what.substr(pos)));
  }
  if (!j.is_object()) ctx.fail("", "expected a JSON object");

  static const std::vector<std::string> known{"d", "alphabet", "adjacency", "matrices", "theta",
                                              "holder_alpha", "block_radius", "blocks", "description"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) ctx.fail("/" + key, "unknown field");
  if (j.contains("description") && !j["description"].is_string()) ctx.fail("/description", "expected a string");

  const int d = ctx.integer(ctx.field(j, "d"), "/d");
  if (d < 1) ctx.fail("/d", "must be >= 1");
  const int q = ctx.integer(ctx.field(j, "alphabet"), "/alphabet");
  if (q < 1) ctx.fail("/alphabet", "must be >= 1");

  const auto& adj_json = ctx.field(j, "adjacency");
  if (!adj_json.is_array() || adj_json.size() != static_cast<std::size_t>(q))
    ctx.fail("/adjacency", "expected " + std::to_string(q) + " rows");
  AdjacencyMatrix adj(static_cast<std::size_t>(q), std::vector<int>(static_cast<std::size_t>(q)));
  for (int r = 0; r < q; ++r) {
    const auto& row = adj_json[static_cast<std::size_t>(r)];
    const std::string rp = "/adjacency/" + std::to_string(r);
    if (!row.is_array() || row.size() != static_cast<std::size_t>(q)) ctx.fail(rp, "expected " + std::to_string(q) + " entries");
    for (int col = 0; col < q; ++col) {
      const std::string ep = rp + "/" + std::to_string(col);
      const int v = ctx.integer(row[static_cast<std::size_t>(col)], ep);
      if (v != 0 && v != 1) ctx.fail(ep, "entries must be 0 or 1");
      adj[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] = v;
    }
  }

  const double theta = ctx.number(ctx.field(j, "theta"), "/theta");
  if (!(theta > 0.0 && theta < 1.0)) ctx.fail("/theta", "must lie in (0,1)");
  const double alpha = ctx.number(ctx.field(j, "holder_alpha"), "/holder_alpha");
  if (!(alpha > 0.0 && alpha <= 1.0)) ctx.fail("/holder_alpha", "must lie in (0,1]");

  std::optional<Subshift> sub;
  try {
    sub.emplace(adj, theta);
  } catch (const std::invalid_argument& e) {
    ctx.fail("/adjacency", e.what());
  }

  const bool has_blocks = j.contains("block_radius") || j.contains("blocks");
  if (has_blocks && j.contains("matrices")) ctx.fail("/matrices", "give either matrices or block_radius + blocks");
  const std::string sha = sha256_hex(text);

  if (!has_blocks) {
    const auto& mats = ctx.field(j, "matrices");
    if (!mats.is_array() || mats.size() != static_cast<std::size_t>(q))
      ctx.fail("/matrices", "expected " + std::to_string(q) + " matrices");
    std::vector<Matrix> gens;
    for (int a = 0; a < q; ++a) gens.push_back(ctx.matrix(mats[static_cast<std::size_t>(a)], d, "/matrices/" + std::to_string(a)));
    try {
      return LoadedSpec{Cocycle(*sub, std::move(gens), alpha), std::nullopt, sha};
    } catch (const std::invalid_argument& e) {
      ctx.fail("/matrices", e.what());
    }
  }

  const int k = ctx.integer(ctx.field(j, "block_radius"), "/block_radius");
  if (k < 0) ctx.fail("/block_radius", "must be >= 0");
  const auto& blocks_json = ctx.field(j, "blocks");
  if (!blocks_json.is_object()) ctx.fail("/blocks", "expected an object keyed by blocks");
  std::map<Word, Matrix> blocks;
  for (const auto& [key, value] : blocks_json.items()) {
    const std::string bp = "/blocks/" + key;
    Word w;
    try {
      w = Word::parse(key, q);
    } catch (const std::invalid_argument& e) {
      ctx.fail(bp, e.what());
    }
    if (static_cast<int>(w.size()) != 2 * k + 1) ctx.fail(bp, "block length must be " + std::to_string(2 * k + 1));
    if (!blocks.emplace(w, ctx.matrix(value, d, bp)).second) ctx.fail(bp, "duplicate block");
  }
  try {
    BlockCocycle bc(*sub, k, std::move(blocks), alpha);
    Cocycle one_step = recode(bc);
    return LoadedSpec{std::move(one_step), std::move(bc), sha};
  } catch (const std::invalid_argument& e) {
    ctx.fail("/blocks", e.what());
  }
}

LoadedSpec load_spec_file(const std::string& path) { return parse_spec_text(read_file(path), path); }

}  // namespace tfc::cli
