#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hgkt {

/// Bijective map between external string ids and dense indices,
/// assigned in order of first appearance.
class Interner {
 public:
  std::size_t intern(std::string_view id);
  std::optional<std::size_t> find(std::string_view id) const;
  const std::string& name(std::size_t index) const;
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Exercise {
  std::size_t index = 0;
  std::size_t knowledge = 0;
  std::optional<std::string> text;
  std::optional<std::size_t> embedding_row;
};

/// Immutable after construction; safe to share read-only across threads.
class ExerciseCorpus {
 public:
  ExerciseCorpus() = default;

  static ExerciseCorpus load(const std::filesystem::path& path);
  static ExerciseCorpus parse(std::istream& in);

  /// Appends one exercise; throws ValidationError on a duplicate id.
  std::size_t add(std::string_view exercise_id, std::string_view knowledge_id,
                  std::optional<std::string> text = std::nullopt);

  std::size_t exercise_count() const { return exercises_.size(); }
  std::size_t knowledge_count() const { return knowledge_ids_.size(); }
  const Exercise& exercise(std::size_t index) const { return exercises_.at(index); }
  const std::vector<Exercise>& exercises() const { return exercises_; }
  const Interner& exercise_ids() const { return exercise_ids_; }
  const Interner& knowledge_ids() const { return knowledge_ids_; }
  bool has_all_text() const;

 private:
  std::vector<Exercise> exercises_;
  Interner exercise_ids_;
  Interner knowledge_ids_;
};

struct InteractionEvent {
  std::size_t learner = 0;
  std::size_t exercise = 0;
  std::uint8_t correct = 0;
  std::int64_t order_key = 0;
};

struct LearnerSequence {
  std::size_t learner = 0;
  std::vector<InteractionEvent> events;
};

struct InteractionLog {
  Interner learner_ids;
  std::vector<LearnerSequence> sequences;
  std::size_t event_count = 0;
};

/// Groups rows by learner and sorts each group by `t`, ties kept in file order.
InteractionLog load_logs(const std::filesystem::path& path, const ExerciseCorpus& corpus);
InteractionLog parse_logs(std::istream& in, const ExerciseCorpus& corpus);

/// One JSON object per event: learner_id, exercise_id, correct, t.
void write_logs(std::ostream& out, std::span<const LearnerSequence> sequences, const Interner& learner_ids,
                const ExerciseCorpus& corpus);
void save_logs(const std::filesystem::path& path, std::span<const LearnerSequence> sequences,
               const Interner& learner_ids, const ExerciseCorpus& corpus);

/// Learner-level random split; round(ratio * n) learners go to train,
/// clamped so both sides are non-empty.
std::pair<std::vector<LearnerSequence>, std::vector<LearnerSequence>> split_sequences(
    std::span<const LearnerSequence> sequences, double ratio, std::uint64_t seed);

struct SequenceLimits {
  std::size_t min_length = 3;
  std::size_t max_length = 200;
};

/// Drops sequences shorter than min_length and cuts long ones into
/// consecutive windows of at most max_length events (short tails dropped).
std::vector<LearnerSequence> prepare_sequences(std::span<const LearnerSequence> sequences,
                                               SequenceLimits limits = {});

}  // namespace hgkt
