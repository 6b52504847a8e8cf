#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persistminer/stream_io.hpp"

namespace persistminer {

/// How node ids are rendered in a snippet key.
///   Id    - node ids kept verbatim
///   Label - node ids replaced by their labels
///   Order - node ids replaced by first-appearance position (0, 1, 2, ...)
enum class View { Id, Label, Order };

View parse_view(std::string_view name);
std::string_view view_name(View v);

/// Canonical snippet identity: updates rendered `(op,a,rel,b)` and joined
/// with `|`, node ids mapped through the view.
std::string canonicalize(std::span<const EdgeUpdate> updates, View view);
std::string canonicalize(std::span<const EdgeUpdate* const> updates, View view);
/// Same keys, written into a caller-owned buffer (cleared first).
void canonicalize_into(std::string& out, std::span<const EdgeUpdate> updates, View view);
void canonicalize_into(std::string& out, std::span<const EdgeUpdate* const> updates, View view);

/// The updates of the last `width` seconds, oldest first.
class Window {
 public:
  explicit Window(double width) : width_(width) {}

  double width() const noexcept { return width_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const EdgeUpdate& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<EdgeUpdate>& entries() const noexcept { return entries_; }

  /// Drops entries with t - entry.t > width.
  void evict_stale(double t);
  void push(EdgeUpdate u) { entries_.push_back(std::move(u)); }

 private:
  double width_;
  std::deque<EdgeUpdate> entries_;
};

struct SnippetOccurrence {
  std::string key;
  double t = 0.0;

  bool operator==(const SnippetOccurrence&) const = default;
};

/// Evicts stale window entries, appends `u_new`, and returns every valid
/// snippet instance ending at `u_new`: the singleton plus each connected,
/// time-ordered subset of the window of size 2..k_max that contains `u_new`.
/// Each occurrence carries timestamp u_new.t.
///
/// With k_max == 1 the window is left untouched.
std::vector<SnippetOccurrence> extract_new_snippets(Window& window, const EdgeUpdate& u_new,
                                                    View view, std::size_t k_max);

/// Callback flavour of the above; avoids materializing the occurrence vector.
/// `emit` receives the canonical key of each instance as a view into a
/// reused buffer, valid only for the duration of the call.
template <class Emit>
void for_each_new_snippet(Window& window, const EdgeUpdate& u_new, View view,
                          std::size_t k_max, Emit&& emit);

namespace detail {

/// Enumerates index sets (into window entries, last entry = u_new) of every
/// connected subset containing the last entry with size <= k_max. Each set is
/// passed sorted ascending, so the snippet order is the window order.
void enumerate_connected(const std::deque<EdgeUpdate>& entries, std::size_t k_max,
                         const std::function<void(std::span<const std::size_t>)>& visit);

}  // namespace detail

template <class Emit>
void for_each_new_snippet(Window& window, const EdgeUpdate& u_new, View view,
                          std::size_t k_max, Emit&& emit) {
  thread_local std::string key;
  if (k_max <= 1) {
    canonicalize_into(key, std::span<const EdgeUpdate>(&u_new, 1), view);
    emit(std::string_view(key));
    return;
  }
  window.evict_stale(u_new.t);
  window.push(u_new);
  const auto& entries = window.entries();
  thread_local std::vector<const EdgeUpdate*> seq;
  detail::enumerate_connected(entries, k_max, [&](std::span<const std::size_t> idx) {
    seq.clear();
    for (std::size_t i : idx) seq.push_back(&entries[i]);
    canonicalize_into(key, std::span<const EdgeUpdate* const>(seq), view);
    emit(std::string_view(key));
  });
}

}  // namespace persistminer
