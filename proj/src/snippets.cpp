#include "persistminer/snippets.hpp"

#include <algorithm>
#include <charconv>
#include <utility>

#include "persistminer/error.hpp"

namespace persistminer {
namespace {

bool shares_node(const EdgeUpdate& a, const EdgeUpdate& b) {
  return a.src == b.src || a.src == b.dst || a.dst == b.src || a.dst == b.dst;
}

// First-appearance numbering for the ORDER view; snippets are small, so a
// linear scan beats hashing.
class OrderMap {
 public:
  std::size_t index_of(std::string_view id) {
    for (std::size_t i = 0; i < seen_.size(); ++i)
      if (seen_[i] == id) return i;
    seen_.push_back(id);
    return seen_.size() - 1;
  }

 private:
  std::vector<std::string_view> seen_;
};

const std::string& label_or_throw(const std::optional<std::string>& label,
                                  const EdgeUpdate& u) {
  if (!label) {
    throw ViewError("LABEL view: update '" + format_update(u) + "' has no node labels");
  }
  return *label;
}

template <class Deref>
void canonicalize_impl(std::string& key, std::size_t n, Deref&& at, View view) {
  key.clear();
  OrderMap order;
  auto append_index = [&key](std::size_t v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    key.append(buf, end);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const EdgeUpdate& u = at(i);
    if (i > 0) key += '|';
    key += '(';
    key += op_char(u.op);
    key += ',';
    switch (view) {
      case View::Id:
        key += u.src;
        key += ',';
        key += u.rel;
        key += ',';
        key += u.dst;
        break;
      case View::Label:
        key += label_or_throw(u.src_label, u);
        key += ',';
        key += u.rel;
        key += ',';
        key += label_or_throw(u.dst_label, u);
        break;
      case View::Order:
        append_index(order.index_of(u.src));
        key += ',';
        key += u.rel;
        key += ',';
        append_index(order.index_of(u.dst));
        break;
    }
    key += ')';
  }
}

// ESU-style enumeration of connected vertex sets containing the root, where
// "vertices" are window entries and two entries are adjacent when their
// updates share an endpoint. The exclusive-neighbourhood rule makes every
// connected set appear exactly once, grown one entry at a time.
class ConnectedEnumerator {
 public:
  ConnectedEnumerator(const std::deque<EdgeUpdate>& entries, std::size_t k_max,
                      const std::function<void(std::span<const std::size_t>)>& visit)
      : entries_(entries), k_max_(k_max), visit_(visit) {}

  void run() {
    const std::size_t root = entries_.size() - 1;
    members_.push_back(root);
    std::vector<std::size_t> ext;
    if (k_max_ > 1) {
      for (std::size_t i = 0; i < root; ++i)
        if (shares_node(entries_[i], entries_[root])) ext.push_back(i);
    }
    extend(std::move(ext));
  }

 private:
  bool in_members(std::size_t i) const {
    return std::find(members_.begin(), members_.end(), i) != members_.end();
  }

  bool adjacent_to_members(std::size_t i) const {
    for (std::size_t m : members_)
      if (shares_node(entries_[i], entries_[m])) return true;
    return false;
  }

  void emit() {
    sorted_ = members_;
    std::sort(sorted_.begin(), sorted_.end());
    visit_(std::span<const std::size_t>(sorted_));
  }

  void extend(std::vector<std::size_t> ext) {
    emit();
    if (members_.size() == k_max_) return;
    const std::size_t root = entries_.size() - 1;
    while (!ext.empty()) {
      std::size_t w = ext.back();
      ext.pop_back();
      std::vector<std::size_t> next = ext;
      for (std::size_t u = 0; u < root; ++u) {
        if (u == w || in_members(u)) continue;
        if (std::find(ext.begin(), ext.end(), u) != ext.end()) continue;
        if (!shares_node(entries_[u], entries_[w])) continue;
        if (adjacent_to_members(u)) continue;
        next.push_back(u);
      }
      members_.push_back(w);
      extend(std::move(next));
      members_.pop_back();
    }
  }

  const std::deque<EdgeUpdate>& entries_;
  std::size_t k_max_;
  const std::function<void(std::span<const std::size_t>)>& visit_;
  std::vector<std::size_t> members_;
  std::vector<std::size_t> sorted_;
};

}  // namespace

View parse_view(std::string_view name) {
  if (name == "id" || name == "ID") return View::Id;
  if (name == "label" || name == "LABEL") return View::Label;
  if (name == "order" || name == "ORDER") return View::Order;
  throw ConfigError("unknown view '" + std::string(name) + "' (expected id|label|order)");
}

std::string_view view_name(View v) {
  switch (v) {
    case View::Id:
      return "id";
    case View::Label:
      return "label";
    case View::Order:
      return "order";
  }
  return "id";
}

void canonicalize_into(std::string& out, std::span<const EdgeUpdate> updates, View view) {
  canonicalize_impl(
      out, updates.size(), [&](std::size_t i) -> const EdgeUpdate& { return updates[i]; }, view);
}

void canonicalize_into(std::string& out, std::span<const EdgeUpdate* const> updates, View view) {
  canonicalize_impl(
      out, updates.size(), [&](std::size_t i) -> const EdgeUpdate& { return *updates[i]; }, view);
}

std::string canonicalize(std::span<const EdgeUpdate> updates, View view) {
  std::string key;
  canonicalize_into(key, updates, view);
  return key;
}

std::string canonicalize(std::span<const EdgeUpdate* const> updates, View view) {
  std::string key;
  canonicalize_into(key, updates, view);
  return key;
}

void Window::evict_stale(double t) {
  // Entries are time-ordered, so stale ones form a prefix.
  while (!entries_.empty() && t - entries_.front().t > width_) entries_.pop_front();
}

namespace detail {

void enumerate_connected(const std::deque<EdgeUpdate>& entries, std::size_t k_max,
                         const std::function<void(std::span<const std::size_t>)>& visit) {
  if (entries.empty() || k_max == 0) return;
  ConnectedEnumerator(entries, k_max, visit).run();
}

}  // namespace detail

std::vector<SnippetOccurrence> extract_new_snippets(Window& window, const EdgeUpdate& u_new,
                                                    View view, std::size_t k_max) {
  std::vector<SnippetOccurrence> out;
  for_each_new_snippet(window, u_new, view, k_max, [&](std::string_view key) {
    out.push_back(SnippetOccurrence{std::string(key), u_new.t});
  });
  return out;
}

}  // namespace persistminer
