#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace payattr {

enum class TransactionKind { payment, charge };
enum class Audience { public_, friends, private_ };
enum class Role { actor, target };

std::string_view to_string(TransactionKind kind);
std::string_view to_string(Audience audience);
std::string_view to_string(Role role);

/// One payment or charge event between two users.
struct Transaction {
  std::string id;
  std::string created_at;  // ISO-8601 UTC; ordering is lexicographic
  std::string note;
  TransactionKind kind = TransactionKind::payment;
  std::string actor_id;
  std::string actor_name;
  std::string target_id;
  std::string target_name;
  std::int64_t likes_count = 0;
  std::int64_t comments_count = 0;
  Audience audience = Audience::public_;

  bool operator==(const Transaction&) const = default;
};

/// Parses one record in the input JSONL schema. Throws ParseError when the
/// object violates the schema or the Transaction invariants.
Transaction transaction_from_json(const nlohmann::json& j);
nlohmann::json transaction_to_json(const Transaction& t);

struct Post {
  std::shared_ptr<const Transaction> transaction;
  Role role = Role::actor;
};

struct UserProfile {
  std::string user_id;
  std::string display_name;
  std::vector<Post> posts;  // created_at ascending, id tiebreak
};

/// Transactions indexed by id, and the users that appear in them. Immutable
/// once built; transactions are shared between the two profiles they touch.
struct Corpus {
  std::map<std::string, std::shared_ptr<const Transaction>> transactions;
  std::map<std::string, UserProfile> users;

  std::size_t transaction_count() const { return transactions.size(); }
  std::size_t user_count() const { return users.size(); }
};

struct LoadOptions {
  bool strict = false;
};

struct LoadResult {
  std::vector<Transaction> transactions;
  std::size_t skipped_malformed = 0;
  std::size_t duplicates = 0;
};

/// Reads line-delimited JSON. Duplicate ids keep the first occurrence.
/// Lenient mode counts and skips malformed lines; strict mode throws
/// ParseError naming the first bad line. Blank lines are ignored.
LoadResult load_transactions(std::istream& in, const LoadOptions& options = {});
LoadResult load_transactions_file(const std::string& path, const LoadOptions& options = {});

void write_transactions(std::ostream& out, const std::vector<Transaction>& transactions);
void write_transactions_file(const std::string& path, const std::vector<Transaction>& transactions);

/// Indexes each transaction under its actor and its target. Input must
/// already be deduplicated by id.
Corpus group_by_user(const std::vector<Transaction>& transactions);

/// Note length in Unicode scalar values -> number of unique transactions.
std::map<std::size_t, std::size_t> note_length_histogram(const Corpus& corpus);

/// Keeps users with at least `min_posts` posts. The transaction map is left
/// untouched so dropped users' transactions remain available.
Corpus filter_min_posts(const Corpus& corpus, std::size_t min_posts);

/// Transactions of a corpus in id order.
std::vector<Transaction> corpus_transactions(const Corpus& corpus);

}  // namespace payattr
