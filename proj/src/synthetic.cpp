#include "mta/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "mta/rng.hpp"

namespace mta {

std::vector<UserHistory> synthetic_corpus(const SyntheticSpec& spec) {
  std::vector<UserHistory> users;
  users.reserve(static_cast<std::size_t>(spec.n_users));
  std::int64_t seq = 0;
  for (int u = 0; u < spec.n_users; ++u) {
    UserHistory user;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%07d", u);
    user.user_id = buf;
    KeyedRng rng(derive_seed(spec.seed, {tag_of("corpus"), static_cast<std::uint64_t>(u)}));
    for (int adv = 0; adv < spec.n_advertisers; ++adv) {
      char adv_id[16], io_id[16];
      std::snprintf(adv_id, sizeof(adv_id), "adv%02d", adv + 1);
      std::snprintf(io_id, sizeof(io_id), "io%02d", adv + 1);
      const int n_touches = static_cast<int>(rng.next_in(0, spec.max_touches));
      for (int t = 0; t < n_touches; ++t) {
        TouchPoint tp;
        tp.user_id = user.user_id;
        tp.timestamp = spec.t0 + rng.next_in(0, spec.span_seconds);
        tp.kind = rng.next_unit() < 0.2 ? TouchKind::click : TouchKind::impression;
        char li[16];
        std::snprintf(li, sizeof(li), "li%02d",
                      static_cast<int>(rng.next_in(1, spec.n_line_items)));
        tp.line_item_id = li;
        tp.insertion_order_id = io_id;
        tp.advertiser_id = adv_id;
        tp.cost = rng.next_in(spec.cost_min, spec.cost_max);
        tp.ingest_seq = seq++;
        user.touch_points.push_back(std::move(tp));
      }
      for (int a = 0; a < spec.max_actions; ++a) {
        if (rng.next_unit() >= spec.action_prob) continue;
        ActionEvent ev;
        ev.user_id = user.user_id;
        ev.timestamp = spec.t0 + rng.next_in(0, spec.span_seconds);
        ev.advertiser_id = adv_id;
        ev.insertion_order_id = io_id;
        ev.value = rng.next_in(spec.value_min, spec.value_max);
        ev.ingest_seq = seq++;
        user.actions.push_back(std::move(ev));
      }
    }
    auto by_time = [](const auto& a, const auto& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.ingest_seq < b.ingest_seq;
    };
    std::sort(user.touch_points.begin(), user.touch_points.end(), by_time);
    std::sort(user.actions.begin(), user.actions.end(), by_time);
    users.push_back(std::move(user));
  }
  return users;
}

}  // namespace mta
