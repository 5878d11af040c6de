#include "hgkt/embedding.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hgkt/errors.hpp"

namespace hgkt {

namespace {

constexpr char kMagic[8] = {'H', 'G', 'K', 'T', 'E', 'M', 'B', '1'};

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void EmbeddingTable::validate() const {
  if (dim == 0) throw ValidationError("embedding dim must be positive");
  if (rows.size() != row_ids.size() * dim) {
    throw ValidationError("embedding table has " + std::to_string(rows.size()) + " values, expected " +
                          std::to_string(row_ids.size() * dim));
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!std::isfinite(rows[k])) {
      throw ValidationError("non-finite embedding value in row " + std::to_string(k / dim));
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : row_ids) {
    if (!seen.insert(id).second) throw ValidationError("duplicate embedding row id \"" + id + "\"");
  }
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw ValidationError(path.string() + ": bad magic, not an HGKTEMB1 file");
  }
  auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t n = read_u32_le(p + 8);
  const std::uint32_t d = read_u32_le(p + 12);
  const std::uint64_t trailer = 16 + 4ULL * n * d;
  if (d == 0) throw ValidationError(path.string() + ": zero embedding dim");
  if (bytes.size() < trailer) throw ValidationError(path.string() + ": truncated embedding payload");

  EmbeddingTable table;
  table.dim = d;
  table.rows.resize(static_cast<std::size_t>(n) * d);
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    table.rows[k] = std::bit_cast<float>(read_u32_le(p + 16 + 4 * k));
  }
  nlohmann::json ids;
  try {
    ids = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(trailer), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed id trailer (" + e.what() + ")");
  }
  if (!ids.is_array() || ids.size() != n) {
    throw ValidationError(path.string() + ": id trailer must be an array of " + std::to_string(n) + " strings");
  }
  for (const auto& id : ids) {
    if (!id.is_string()) throw ValidationError(path.string() + ": non-string id in trailer");
    table.row_ids.push_back(id.get<std::string>());
  }
  table.validate();
  return table;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  table.validate();
  std::string out(kMagic, 8);
  put_u32_le(out, static_cast<std::uint32_t>(table.size()));
  put_u32_le(out, static_cast<std::uint32_t>(table.dim));
  for (float v : table.rows) put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  out += nlohmann::json(table.row_ids).dump();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

EmbeddingTable align_embeddings(const EmbeddingTable& table, const ExerciseCorpus& corpus) {
  EmbeddingTable out;
  out.dim = table.dim;
  out.rows.assign(corpus.exercise_count() * table.dim, 0.0f);
  std::vector<bool> filled(corpus.exercise_count(), false);
  for (std::size_t r = 0; r < table.size(); ++r) {
    auto ex = corpus.exercise_ids().find(table.row_ids[r]);
    if (!ex) throw ValidationError("embedding row id \"" + table.row_ids[r] + "\" is not a known exercise");
    if (filled[*ex]) throw ValidationError("exercise \"" + table.row_ids[r] + "\" has two embedding rows");
    filled[*ex] = true;
    auto src = table.row(r);
    std::copy(src.begin(), src.end(), out.rows.begin() + static_cast<std::ptrdiff_t>(*ex * table.dim));
  }
  for (std::size_t e = 0; e < filled.size(); ++e) {
    if (!filled[e]) {
      throw ValidationError("exercise \"" + corpus.exercise_ids().name(e) + "\" has no embedding row");
    }
  }
  out.row_ids = corpus.exercise_ids().names();
  return out;
}

std::vector<std::string> tokenize_lower(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

EmbeddingTable fallback_embed(const ExerciseCorpus& corpus, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("fallback embedding dim must be at least 2");
  for (const auto& ex : corpus.exercises()) {
    if (!ex.text) {
      throw ValidationError("exercise \"" + corpus.exercise_ids().name(ex.index) +
                            "\" has no text; supply an embedding file instead");
    }
  }
  EmbeddingTable table;
  table.dim = dim;
  table.row_ids = corpus.exercise_ids().names();
  table.rows.assign(corpus.exercise_count() * dim, 0.0f);
  std::vector<double> acc(dim);
  for (const auto& ex : corpus.exercises()) {
    std::fill(acc.begin(), acc.end(), 0.0);
    auto tokens = tokenize_lower(*ex.text);
    if (tokens.empty()) tokens.emplace_back("<empty>");
    for (const auto& tok : tokens) {
      std::uint64_t state = fnv1a(tok) ^ (seed * 0xd1342543de82ef95ULL);
      for (std::size_t k = 0; k < dim; ++k) {
        // Uniform in [-1, 1) from the top 53 bits.
        double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        acc[k] += 2.0 * u - 1.0;
      }
    }
    double norm = 0.0;
    for (double v : acc) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < dim; ++k) {
      table.rows[ex.index * dim + k] = static_cast<float>(acc[k] / norm);
    }
  }
  return table;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += static_cast<double>(a[k]) * b[k];
    na += static_cast<double>(a[k]) * a[k];
    nb += static_cast<double>(b[k]) * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace hgkt
