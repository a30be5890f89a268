#include "payattr/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "payattr/error.hpp"
#include "payattr/unicode.hpp"

namespace payattr {

using nlohmann::json;

std::string_view to_string(TransactionKind kind) {
  return kind == TransactionKind::charge ? "charge" : "payment";
}

std::string_view to_string(Audience audience) {
  switch (audience) {
    case Audience::friends: return "friends";
    case Audience::private_: return "private";
    case Audience::public_: break;
  }
  return "public";
}

std::string_view to_string(Role role) { return role == Role::actor ? "actor" : "target"; }

namespace {

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t optional_count(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0;
  if (!it->is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw ParseError(std::string("field '") + key + "' must be non-negative");
  return v;
}

void read_party(const json& j, const char* key, std::string& id, std::string& name) {
  const json& party = require(j, key);
  if (!party.is_object()) throw ParseError(std::string("field '") + key + "' must be an object");
  id = require_string(party, "id");
  auto it = party.find("name");
  name = (it != party.end() && it->is_string()) ? it->get<std::string>() : std::string{};
}

}  // namespace

Transaction transaction_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  Transaction t;
  t.id = require_string(j, "id");
  if (t.id.empty()) throw ParseError("empty transaction id");
  t.created_at = require_string(j, "date_created");
  if (auto it = j.find("note"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("field 'note' must be a string");
    t.note = it->get<std::string>();
  }
  const std::string type = require_string(j, "type");
  if (type == "payment") {
    t.kind = TransactionKind::payment;
  } else if (type == "charge") {
    t.kind = TransactionKind::charge;
  } else {
    throw ParseError("unknown transaction type '" + type + "'");
  }
  read_party(j, "actor", t.actor_id, t.actor_name);
  read_party(j, "target", t.target_id, t.target_name);
  if (t.actor_id.empty() || t.target_id.empty()) throw ParseError("empty actor or target id");
  if (t.actor_id == t.target_id) throw ParseError("actor and target are the same user");
  t.likes_count = optional_count(j, "likes_count");
  t.comments_count = optional_count(j, "comments_count");
  if (auto it = j.find("audience"); it != j.end() && it->is_string()) {
    const auto& a = it->get_ref<const std::string&>();
    if (a == "friends") {
      t.audience = Audience::friends;
    } else if (a == "private") {
      t.audience = Audience::private_;
    } else if (a == "public") {
      t.audience = Audience::public_;
    } else {
      throw ParseError("unknown audience '" + a + "'");
    }
  }
  return t;
}

json transaction_to_json(const Transaction& t) {
  return json{
      {"id", t.id},
      {"date_created", t.created_at},
      {"note", t.note},
      {"type", to_string(t.kind)},
      {"actor", {{"id", t.actor_id}, {"name", t.actor_name}}},
      {"target", {{"id", t.target_id}, {"name", t.target_name}}},
      {"likes_count", t.likes_count},
      {"comments_count", t.comments_count},
      {"audience", to_string(t.audience)},
  };
}

LoadResult load_transactions(std::istream& in, const LoadOptions& options) {
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; })) {
      continue;
    }
    Transaction t;
    try {
      t = transaction_from_json(json::parse(line));
    } catch (const std::exception& e) {
      if (options.strict) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
      ++result.skipped_malformed;
      continue;
    }
    if (!seen.insert(t.id).second) {
      ++result.duplicates;
      continue;
    }
    result.transactions.push_back(std::move(t));
  }
  if (in.bad()) throw IoError("stream read failure after line " + std::to_string(line_no));
  return result;
}

LoadResult load_transactions_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_transactions(in, options);
}

void write_transactions(std::ostream& out, const std::vector<Transaction>& transactions) {
  for (const auto& t : transactions) {
    out << transaction_to_json(t).dump() << '\n';
  }
}

void write_transactions_file(const std::string& path, const std::vector<Transaction>& transactions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_transactions(out, transactions);
  if (!out) throw IoError("write failed for '" + path + "'");
}

Corpus group_by_user(const std::vector<Transaction>& transactions) {
  Corpus corpus;
  for (const auto& t : transactions) {
    auto shared = std::make_shared<const Transaction>(t);
    corpus.transactions.emplace(t.id, shared);
  }
  for (const auto& [id, t] : corpus.transactions) {
    auto add = [&](const std::string& user, const std::string& name, Role role) {
      auto& profile = corpus.users[user];
      if (profile.user_id.empty()) profile.user_id = user;
      if (profile.display_name.empty()) profile.display_name = name;
      profile.posts.push_back(Post{t, role});
    };
    add(t->actor_id, t->actor_name, Role::actor);
    add(t->target_id, t->target_name, Role::target);
  }
  for (auto& [user, profile] : corpus.users) {
    std::sort(profile.posts.begin(), profile.posts.end(), [](const Post& a, const Post& b) {
      if (a.transaction->created_at != b.transaction->created_at) {
        return a.transaction->created_at < b.transaction->created_at;
      }
      return a.transaction->id < b.transaction->id;
    });
    // Display name taken from the earliest post so it does not depend on
    // input order.
    const Post& first = profile.posts.front();
    profile.display_name =
        first.role == Role::actor ? first.transaction->actor_name : first.transaction->target_name;
  }
  return corpus;
}

std::map<std::size_t, std::size_t> note_length_histogram(const Corpus& corpus) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [id, t] : corpus.transactions) {
    ++hist[unicode::scalar_length(t->note)];
  }
  return hist;
}

Corpus filter_min_posts(const Corpus& corpus, std::size_t min_posts) {
  Corpus out;
  out.transactions = corpus.transactions;
  for (const auto& [user, profile] : corpus.users) {
    if (profile.posts.size() >= min_posts) out.users.emplace(user, profile);
  }
  return out;
}

std::vector<Transaction> corpus_transactions(const Corpus& corpus) {
  std::vector<Transaction> out;
  out.reserve(corpus.transactions.size());
  for (const auto& [id, t] : corpus.transactions) out.push_back(*t);
  return out;
}

}  // namespace payattr
