// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <iostream>
#include <string>

#include "fusionforge/amalgam.hpp"
#include "fusionforge/fusion.hpp"
#include "fusionforge/groups.hpp"
#include "fusionforge/polyspace.hpp"

using namespace ff;

namespace {

int failures = 0;

u64 now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string first_fail(const CheckList& c) {
  for (const Check& it : c.items)
    if (!it.pass) return it.id + (it.detail.empty() ? "" : ": " + it.detail);
  return "";
}

void line(int idx, const std::string& label, bool ok, u64 ms, const std::string& why) {
  std::cout << "criterion " << idx << " [" << (ok ? "PASS" : "FAIL") << "] " << label
            << " (" << ms << " ms)";
  if (!ok && !why.empty()) std::cout << "  -- " << why;
  std::cout << std::endl;
  if (!ok) ++failures;
}

template <typename Fn>
void criterion(int idx, const std::string& label, Fn fn) {
  u64 t0 = now_ms();
  bool ok = false;
  std::string why;
  try {
    CheckList c = fn();
    ok = c.all_pass();
    if (!ok) why = first_fail(c);
  } catch (const std::exception& e) {
    why = e.what();
  }
  line(idx, label, ok, now_ms() - t0, why);
}

}  // namespace

int main() {
  criterion(1, "bilinear form: alternating, non-degenerate, scaling, full grid", [] {
    CheckList all;
    for (u32 p : {5u, 7u, 11u, 13u})
      for (u32 m = 1; m <= p - 1; m += 2) {
        CheckList c = verify_form(p, m);
        all.items.insert(all.items.end(), c.items.begin(), c.items.end());
      }
    return all;
  });

  criterion(2, "Q extraspecial of order p^(p-2), S of order p^(p-1), exponent p", [] {
    CheckList all;
    for (auto [p, m] : std::vector<std::pair<u32, u32>>{{5, 1}, {7, 3}}) {
      GroupSet gs = build_groups(p, m);
      CheckList c = verify_Q_structure(gs);
      all.items.insert(all.items.end(), c.items.begin(), c.items.end());
    }
    return all;
  });

  criterion(3, "w-vector identities, exhaustive over all field parameters", [] {
    CheckList all;
    for (auto [p, m] : std::vector<std::pair<u32, u32>>{{5, 1}, {7, 3}}) {
      CheckList c = check_w_identities(p, m);
      all.items.insert(all.items.end(), c.items.begin(), c.items.end());
    }
    return all;
  });

  // Shared p=5 data for criteria 4 and 6.
  static GroupSet gs5 = build_groups(5, 1);
  static AmalgamData am5 = build_amalgam(gs5);

  criterion(4, "N_P1(W_0) by brute force, Theta a homomorphism onto C, W_0 -> W", [] {
    CheckList all;
    for (const CheckList& c : {verify_normalizer(gs5, am5), verify_theta_struct(5, 1),
                               verify_theta_tables(gs5, am5)})
      all.items.insert(all.items.end(), c.items.begin(), c.items.end());
    return all;
  });

  criterion(5, "existence search: EXISTS exactly at m = p-4; order-27 exclusion", [] {
    CheckList all = check_existence_grid();
    for (u32 p : {5u, 7u, 11u, 13u})
      for (u32 m = 1; m <= p - 1; m += 2) {
        ExistenceResult r = search_existence(p, m);
        all.add("exists.p" + std::to_string(p) + ".m" + std::to_string(m),
                r.exists == (m + 4 == p));
      }
    CheckList p3 = verify_p3_exclusion();
    all.items.insert(all.items.end(), p3.items.begin(), p3.items.end());
    return all;
  });

  criterion(6, "distinct Sylow 5-subgroups of K meet in W; N_P1(W_0) matches C", [] {
    CheckList all = sylow_structure_K(gs5);
    CheckList tf = finite_tree_facts(gs5, am5);
    all.items.insert(all.items.end(), tf.items.begin(), tf.items.end());
    return all;
  });

  static std::unique_ptr<FusionBundle> fb;
  criterion(7, "generated fusion system on S: saturated, W centric, containments, idempotent",
            [] {
              fb = build_fusion_main(5, 1);
              return verify_fusion_main(*fb);
            });

  criterion(8, "B-variant system: saturated with exactly one essential class", [] {
    if (!fb) throw std::runtime_error("criterion 7 did not produce the bundle");
    return verify_b_variant(*fb);
  });

  if (failures == 0) {
    std::cout << "acceptance: all 8 criteria pass" << std::endl;
    return 0;
  }
  std::cout << "acceptance: " << failures << " criteria FAILED" << std::endl;
  return 1;
}
