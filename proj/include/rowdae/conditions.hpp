#pragma once

// Order conditions for both method families, evaluated as tree contractions.
//
// Each condition is stored as its index product, e.g.
//   "b_i w_ij alpha_jk alpha_jl"  ==  sum b_i w_ij alpha_jk alpha_jl.
// A factor X_pc hangs a new vertex c below vertex p; when a letter is reused
// it names the most recent vertex bound to it, so products such as
// "w_ij alpha_jk beta_kl alpha_jl beta_lm" describe a vertex j with two
// independent branches. The value of a vertex is the elementwise product over
// its branches of (X * value(child)); leaves are the ones vector.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rowdae/errors.hpp"
#include "rowdae/linalg.hpp"
#include "rowdae/tableau.hpp"

namespace rowdae {

struct ConditionSpec {
  int index;
  std::string_view expression;
  int rhs_num;
  int rhs_den;
};

enum class Factor { alpha, beta, w };

/// Parsed condition: vertex 0 is the root carrying the weights.
struct ConditionTree {
  struct Edge {
    Factor factor;
    std::size_t child;
  };
  std::vector<std::vector<Edge>> children;
  /// Order p from which the condition is required.
  int order = 0;
  bool uses_w = false;

  std::size_t vertex_count() const noexcept { return children.size(); }
};

// clang-format off
inline constexpr std::array<ConditionSpec, 130> kRowConditionTable{{
    {1, "b_i", 1, 1},
    {2, "b_i beta_ij", 1, 2},
    {3, "b_i w_ij alpha_jk alpha_jl", 1, 1},
    {4, "b_i beta_ij beta_jk", 1, 6},
    {5, "b_i alpha_ij alpha_ik", 1, 3},
    {6, "b_i w_ij alpha_jk alpha_jl beta_lm", 1, 2},
    {7, "b_i w_ij alpha_jk alpha_jl alpha_jm", 1, 1},
    {8, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo", 1, 1},
    {9, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln", 1, 4},
    {10, "b_i beta_ij beta_jk beta_kl", 1, 24},
    {11, "b_i alpha_ij alpha_ik beta_kl", 1, 8},
    {12, "b_i beta_ij alpha_jk alpha_jl", 1, 12},
    {13, "b_i alpha_ij alpha_ik alpha_il", 1, 4},
    {14, "b_i w_ij alpha_jk alpha_jl beta_lm beta_mn", 1, 6},
    {15, "b_i w_ij alpha_jk alpha_jl alpha_lm alpha_ln", 1, 3},
    {16, "b_i w_ij alpha_jk alpha_jl alpha_jm beta_mn", 1, 2},
    {17, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo beta_op", 1, 2},
    {18, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_jn", 1, 1},
    {19, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_mp", 1, 1},
    {20, "b_i w_ij alpha_jk alpha_jl alpha_jm w_mn alpha_no alpha_np", 1, 1},
    {21, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr", 1, 1},
    {22, "b_i w_ij alpha_jk beta_kl alpha_jl beta_lm", 1, 4},
    {23, "b_i w_ij alpha_jk beta_kl alpha_jl w_lm alpha_mn alpha_mo", 1, 2},
    {24, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl w_lm alpha_mn alpha_mo", 1, 1},
    {25, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln beta_no", 1, 10},
    {26, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_lo", 1, 5},
    {27, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq", 1, 5},
    {28, "b_i beta_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo", 1, 20},
    {29, "b_i alpha_ij alpha_ik alpha_il w_lm alpha_mn alpha_mo", 1, 5},
    {30, "b_i beta_ij beta_jk beta_kl beta_lm", 1, 120},
    {31, "b_i alpha_ij alpha_ik beta_kl beta_lm", 1, 30},
    {32, "b_i beta_ij alpha_jk alpha_jl beta_lm", 1, 40},
    {33, "b_i alpha_ij alpha_ik alpha_il beta_lm", 1, 10},
    {34, "b_i beta_ij beta_jk alpha_kl alpha_km", 1, 60},
    {35, "b_i alpha_ij alpha_ik alpha_kl alpha_km", 1, 15},
    {36, "b_i beta_ij alpha_jk alpha_jl alpha_jm", 1, 20},
    {37, "b_i alpha_ij alpha_ik alpha_il alpha_im", 1, 5},
    {38, "b_i alpha_ij beta_jk alpha_ik beta_kl", 1, 20},
    {39, "b_i alpha_ij beta_jk alpha_ik w_kl alpha_lm alpha_ln", 1, 10},
    {40, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik w_kl alpha_lm alpha_ln", 1, 5},
    {41, "b_i w_ij alpha_jk alpha_jl alpha_lm alpha_ln w_no alpha_op alpha_oq", 1, 4},
    {42, "b_i w_ij alpha_jk alpha_jl beta_lm beta_mn beta_no", 1, 24},
    {43, "b_i w_ij alpha_jk alpha_jl alpha_lm alpha_ln beta_no", 1, 8},
    {44, "b_i w_ij alpha_jk alpha_jl beta_lm alpha_mn alpha_mo", 1, 12},
    {45, "b_i w_ij alpha_jk alpha_jl alpha_lm alpha_ln alpha_lo", 1, 4},
    {46, "b_i w_ij alpha_jk alpha_jl alpha_jm beta_mn beta_no", 1, 6},
    {47, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo beta_op beta_pq", 1, 6},
    {48, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_mn alpha_mo", 1, 3},
    {49, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_op alpha_oq", 1, 3},
    {50, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_jn beta_no", 1, 2},
    {51, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_mp beta_pq", 1, 2},
    {52, "b_i w_ij alpha_jk alpha_jl alpha_jm w_mn alpha_no alpha_np beta_pq", 1, 2},
    {53, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr beta_rs", 1, 2},
    {54, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_jn alpha_jo", 1, 1},
    {55, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_mp alpha_mq", 1, 1},
    {56, "b_i w_ij alpha_jk alpha_jl alpha_jm w_mn alpha_no alpha_np alpha_nq", 1, 1},
    {57, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr alpha_ps", 1, 1},
    {58, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_jn w_no alpha_op alpha_oq", 1, 1},
    {59, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_mp w_pq alpha_qr alpha_qs", 1, 1},
    {60, "b_i w_ij alpha_jk alpha_jl alpha_jm w_mn alpha_no alpha_np w_pq alpha_qr alpha_qs", 1, 1},
    {61, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr w_rs alpha_st alpha_su", 1, 1},
    {62, "b_i w_ij alpha_jk alpha_jl beta_lm alpha_jm beta_mn", 1, 4},
    {63, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn beta_no alpha_mo beta_op", 1, 4},
    {64, "b_i w_ij alpha_jk alpha_jl beta_lm alpha_jm w_mn alpha_no alpha_np", 1, 2},
    {65, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn beta_no alpha_mo w_op alpha_pq alpha_pr", 1, 2},
    {66, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_jm w_mn alpha_no alpha_np", 1, 1},
    {67, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn w_no alpha_op alpha_oq alpha_mo w_op alpha_pq alpha_pr", 1, 1},
    {68, "b_i w_ij alpha_jk beta_kl alpha_jl beta_lm beta_mn", 1, 12},
    {69, "b_i w_ij alpha_jk beta_kl alpha_jl alpha_lm alpha_ln", 1, 6},
    {70, "b_i w_ij alpha_jk beta_kl alpha_jl w_lm alpha_mn alpha_mo beta_op", 1, 4},
    {71, "b_i w_ij alpha_jk beta_kl alpha_jl w_lm alpha_mn alpha_mo alpha_mp", 1, 2},
    {72, "b_i w_ij alpha_jk beta_kl alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr", 1, 2},
    {73, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl beta_lm beta_mn", 1, 6},
    {74, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl alpha_lm alpha_ln", 1, 3},
    {75, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl w_lm alpha_mn alpha_mo beta_op", 1, 2},
    {76, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl w_lm alpha_mn alpha_mo alpha_mp", 1, 1},
    {77, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr", 1, 1},
    {78, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln beta_no beta_op", 1, 36},
    {79, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_no alpha_np", 1, 18},
    {80, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_lo beta_op", 1, 12},
    {81, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq beta_qr", 1, 12},
    {82, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_lo alpha_lp", 1, 6},
    {83, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq alpha_or", 1, 6},
    {84, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_lo w_op alpha_pq alpha_pr", 1, 6},
    {85, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq w_qr alpha_rs alpha_rt", 1, 6},
    {86, "b_i alpha_ij alpha_ik w_kl alpha_lm beta_mn alpha_ln beta_no", 1, 24},
    {87, "b_i alpha_ij alpha_ik w_kl alpha_lm beta_mn alpha_ln w_no alpha_op alpha_oq", 1, 12},
    {88, "b_i alpha_ij alpha_ik w_kl alpha_lm w_mn alpha_no alpha_np alpha_ln w_no alpha_op alpha_oq", 1, 6},
    {89, "b_i beta_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo beta_op", 1, 60},
    {90, "b_i alpha_ij alpha_ik alpha_il w_lm alpha_mn alpha_mo beta_op", 1, 12},
    {91, "b_i beta_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_mp", 1, 30},
    {92, "b_i alpha_ij alpha_ik alpha_il w_lm alpha_mn alpha_mo alpha_mp", 1, 6},
    {93, "b_i beta_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr", 1, 30},
    {94, "b_i alpha_ij alpha_ik alpha_il w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr", 1, 6},
    {95, "b_i beta_ij beta_jk alpha_kl alpha_km w_mn alpha_no alpha_np", 1, 120},
    {96, "b_i alpha_ij alpha_ik alpha_kl alpha_km w_mn alpha_no alpha_np", 1, 24},
    {97, "b_i beta_ij alpha_jk alpha_jl alpha_jm w_mn alpha_no alpha_np", 1, 30},
    {98, "b_i alpha_ij alpha_ik alpha_il alpha_im w_mn alpha_no alpha_np", 1, 6},
    {99, "b_i beta_ij beta_jk beta_kl beta_lm beta_mn", 1, 720},
    {100, "b_i alpha_ij alpha_ik beta_kl beta_lm beta_mn", 1, 144},
    {101, "b_i beta_ij alpha_jk alpha_jl beta_lm beta_mn", 1, 180},
    {102, "b_i alpha_ij alpha_ik alpha_il beta_lm beta_mn", 1, 36},
    {103, "b_i beta_ij beta_jk alpha_kl alpha_km beta_mn", 1, 240},
    {104, "b_i alpha_ij alpha_ik alpha_kl alpha_km beta_mn", 1, 48},
    {105, "b_i beta_ij alpha_jk alpha_jl alpha_jm beta_mn", 1, 60},
    {106, "b_i alpha_ij alpha_ik alpha_il alpha_im beta_mn", 1, 12},
    {107, "b_i beta_ij beta_jk beta_kl alpha_lm alpha_ln", 1, 360},
    {108, "b_i alpha_ij alpha_ik beta_kl alpha_lm alpha_ln", 1, 72},
    {109, "b_i beta_ij alpha_jk alpha_jl alpha_lm alpha_ln", 1, 90},
    {110, "b_i alpha_ij alpha_ik alpha_il alpha_lm alpha_ln", 1, 18},
    {111, "b_i beta_ij beta_jk alpha_kl alpha_km alpha_kn", 1, 120},
    {112, "b_i alpha_ij alpha_ik alpha_kl alpha_km alpha_kn", 1, 24},
    {113, "b_i beta_ij alpha_jk alpha_jl alpha_jm alpha_jn", 1, 30},
    {114, "b_i alpha_ij alpha_ik alpha_il alpha_im alpha_in", 1, 6},
    {115, "b_i beta_ij alpha_jk beta_kl alpha_jl beta_lm", 1, 120},
    {116, "b_i alpha_ij alpha_ik beta_kl alpha_il beta_lm", 1, 24},
    {117, "b_i beta_ij alpha_jk beta_kl alpha_jl w_lm alpha_mn alpha_mo", 1, 60},
    {118, "b_i alpha_ij alpha_ik beta_kl alpha_il w_lm alpha_mn alpha_mo", 1, 12},
    {119, "b_i beta_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl w_lm alpha_mn alpha_mo", 1, 30},
    {120, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_il w_lm alpha_mn alpha_mo", 1, 6},
    {121, "b_i alpha_ij beta_jk alpha_ik beta_kl beta_lm", 1, 72},
    {122, "b_i alpha_ij beta_jk alpha_ik alpha_kl alpha_km", 1, 36},
    {123, "b_i alpha_ij beta_jk alpha_ik w_kl alpha_lm alpha_ln beta_no", 1, 24},
    {124, "b_i alpha_ij beta_jk alpha_ik w_kl alpha_lm alpha_ln alpha_lo", 1, 12},
    {125, "b_i alpha_ij beta_jk alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq", 1, 12},
    {126, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik beta_kl beta_lm", 1, 36},
    {127, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik alpha_kl alpha_km", 1, 18},
    {128, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik w_kl alpha_lm alpha_ln beta_no", 1, 12},
    {129, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik w_kl alpha_lm alpha_ln alpha_lo", 1, 6},
    {130, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq", 1, 6},
}};

inline constexpr std::array<ConditionSpec, 63> kHalfExplicitConditionTable{{
    {1, "b_i", 1, 1},
    {2, "b_i alpha_ij", 1, 2},
    {3, "b_i w_ij alpha_jk alpha_jl", 1, 1},
    {4, "b_i alpha_ij alpha_jk", 1, 6},
    {5, "b_i alpha_ij alpha_ik", 1, 3},
    {6, "b_i alpha_ij w_jk alpha_kl alpha_km", 1, 3},
    {7, "b_i w_ij alpha_jk alpha_jl alpha_lm", 1, 2},
    {8, "b_i w_ij alpha_jk alpha_jl alpha_jm", 1, 1},
    {9, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo", 1, 1},
    {10, "b_i alpha_ij alpha_jk alpha_kl", 1, 24},
    {11, "b_i alpha_ij alpha_ik alpha_kl", 1, 8},
    {12, "b_i alpha_ij alpha_jk alpha_jl", 1, 12},
    {13, "b_i alpha_ij alpha_ik alpha_il", 1, 4},
    {14, "b_i alpha_ij alpha_jk w_kl alpha_lm alpha_ln", 1, 12},
    {15, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln", 1, 4},
    {16, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_mn", 1, 8},
    {17, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_kn", 1, 4},
    {18, "b_i alpha_ij w_jk alpha_kl alpha_km w_mn alpha_no alpha_np", 1, 4},
    {19, "b_i w_ij alpha_jk alpha_jl alpha_lm alpha_mn", 1, 6},
    {20, "b_i w_ij alpha_jk alpha_jl alpha_lm alpha_ln", 1, 3},
    {21, "b_i w_ij alpha_jk alpha_jl alpha_lm w_mn alpha_no alpha_np", 1, 3},
    {22, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_mn", 1, 2},
    {23, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_op", 1, 2},
    {24, "b_i w_ij alpha_jk alpha_jl alpha_jm alpha_jn", 1, 1},
    {25, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo alpha_mp", 1, 1},
    {26, "b_i w_ij alpha_jk alpha_jl alpha_jm w_mn alpha_no alpha_np", 1, 1},
    {27, "b_i w_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo w_op alpha_pq alpha_pr", 1, 1},
    {28, "b_i w_ij alpha_jk alpha_kl alpha_jl alpha_lm", 1, 4},
    {29, "b_i w_ij alpha_jk alpha_kl alpha_jl w_lm alpha_mn alpha_mo", 1, 2},
    {30, "b_i w_ij alpha_jk w_kl alpha_lm alpha_ln alpha_jl w_lm alpha_mn alpha_mo", 1, 1},
    {31, "b_i alpha_ij alpha_jk alpha_kl alpha_lm", 1, 120},
    {32, "b_i alpha_ij alpha_ik alpha_kl alpha_lm", 1, 30},
    {33, "b_i alpha_ij alpha_jk alpha_jl alpha_lm", 1, 40},
    {34, "b_i alpha_ij alpha_ik alpha_il alpha_lm", 1, 10},
    {35, "b_i alpha_ij alpha_jk alpha_kl alpha_km", 1, 60},
    {36, "b_i alpha_ij alpha_ik alpha_kl alpha_km", 1, 15},
    {37, "b_i alpha_ij alpha_jk alpha_jl alpha_jm", 1, 20},
    {38, "b_i alpha_ij alpha_ik alpha_il alpha_im", 1, 5},
    {39, "b_i alpha_ij alpha_jk alpha_kl w_lm alpha_mn alpha_mo", 1, 60},
    {40, "b_i alpha_ij alpha_ik alpha_kl w_lm alpha_mn alpha_mo", 1, 15},
    {41, "b_i alpha_ij alpha_jk alpha_jl w_lm alpha_mn alpha_mo", 1, 20},
    {42, "b_i alpha_ij alpha_ik alpha_il w_lm alpha_mn alpha_mo", 1, 5},
    {43, "b_i alpha_ij alpha_jk w_kl alpha_lm alpha_ln alpha_no", 1, 40},
    {44, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_no", 1, 10},
    {45, "b_i alpha_ij alpha_jk w_kl alpha_lm alpha_ln alpha_lo", 1, 20},
    {46, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln alpha_lo", 1, 5},
    {47, "b_i alpha_ij alpha_jk w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq", 1, 20},
    {48, "b_i alpha_ij alpha_ik w_kl alpha_lm alpha_ln w_no alpha_op alpha_oq", 1, 5},
    {49, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_mn alpha_no", 1, 30},
    {50, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_mn alpha_mo", 1, 15},
    {51, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_mn w_no alpha_op alpha_oq", 1, 15},
    {52, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_kn alpha_no", 1, 10},
    {53, "b_i alpha_ij w_jk alpha_kl alpha_km w_mn alpha_no alpha_np alpha_pq", 1, 10},
    {54, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_kn alpha_ko", 1, 5},
    {55, "b_i alpha_ij w_jk alpha_kl alpha_km w_mn alpha_no alpha_np alpha_nq", 1, 5},
    {56, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_kn w_no alpha_op alpha_oq", 1, 5},
    {57, "b_i alpha_ij w_jk alpha_kl alpha_km w_mn alpha_no alpha_np w_pq alpha_qr alpha_qs", 1, 5},
    {58, "b_i alpha_ij w_jk alpha_kl alpha_lm alpha_km alpha_mn", 1, 20},
    {59, "b_i alpha_ij w_jk alpha_kl alpha_lm alpha_km w_mn alpha_no alpha_np", 1, 10},
    {60, "b_i alpha_ij w_jk alpha_kl w_lm alpha_mn alpha_mo alpha_km w_mn alpha_no alpha_np", 1, 5},
    {61, "b_i alpha_ij alpha_jk alpha_ik alpha_kl", 1, 20},
    {62, "b_i alpha_ij alpha_jk alpha_ik w_kl alpha_lm alpha_ln", 1, 10},
    {63, "b_i alpha_ij w_jk alpha_kl alpha_km alpha_ik w_kl alpha_lm alpha_ln", 1, 5},
}};
// clang-format on

/// Builds the vertex tree of an index product. The required order counts
/// alpha/beta vertices minus w vertices plus the root; a tree whose root
/// branches through w belongs to the algebraic part of the local error and is
/// needed one order later.
inline ConditionTree parse_condition(std::string_view expr) {
  ConditionTree tree;
  std::array<std::ptrdiff_t, 26> binding;
  binding.fill(-1);
  int meagre = 0;
  int fat = 0;
  bool root_w = false;

  std::size_t pos = 0;
  bool first = true;
  while (pos < expr.size()) {
    while (pos < expr.size() && expr[pos] == ' ') ++pos;
    if (pos >= expr.size()) break;
    const auto end = std::min(expr.find(' ', pos), expr.size());
    const auto tok = expr.substr(pos, end - pos);
    pos = end;

    const auto us = tok.find('_');
    if (us == std::string_view::npos) throw ParseError(0, "bad factor '" + std::string(tok) + "'");
    const auto name = tok.substr(0, us);
    const auto idx = tok.substr(us + 1);

    if (first) {
      if (name != "b" || idx.size() != 1) throw ParseError(0, "condition must start with b_<i>");
      tree.children.emplace_back();
      binding[idx[0] - 'a'] = 0;
      meagre = 1;
      first = false;
      continue;
    }
    if (idx.size() != 2 || idx[0] < 'a' || idx[0] > 'z' || idx[1] < 'a' || idx[1] > 'z') {
      throw ParseError(0, "bad index pair in '" + std::string(tok) + "'");
    }
    Factor f;
    if (name == "alpha") {
      f = Factor::alpha;
      ++meagre;
    } else if (name == "beta") {
      f = Factor::beta;
      ++meagre;
    } else if (name == "w") {
      f = Factor::w;
      ++fat;
      tree.uses_w = true;
    } else {
      throw ParseError(0, "unknown factor '" + std::string(name) + "'");
    }
    const auto parent = binding[idx[0] - 'a'];
    if (parent < 0) throw ParseError(0, "unbound index in '" + std::string(tok) + "'");
    if (parent == 0 && f == Factor::w) root_w = true;
    const std::size_t child = tree.children.size();
    tree.children.emplace_back();
    tree.children[static_cast<std::size_t>(parent)].push_back({f, child});
    binding[idx[1] - 'a'] = static_cast<std::ptrdiff_t>(child);
  }
  if (first) throw ParseError(0, "empty condition");
  tree.order = meagre - fat + (root_w ? 1 : 0);
  return tree;
}

/// Coefficient matrices a condition contracts against.
struct ConditionMatrices {
  DenseMatrix alpha;
  DenseMatrix beta;
  DenseMatrix w;

  const DenseMatrix& operator[](Factor f) const {
    switch (f) {
      case Factor::alpha: return alpha;
      case Factor::beta: return beta;
      case Factor::w: return w;
    }
    return alpha;
  }
};

inline ConditionMatrices condition_matrices(const RowTableau& t) {
  return {t.alpha(), t.beta(), w_matrix(t)};
}

namespace detail {

inline Vector vertex_value(const ConditionTree& tree, const ConditionMatrices& m,
                           std::size_t vertex, std::size_t s) {
  Vector v(s, 1.0);
  for (const auto& edge : tree.children[vertex]) {
    const auto sub = matvec(m[edge.factor], vertex_value(tree, m, edge.child, s));
    for (std::size_t i = 0; i < s; ++i) v[i] *= sub[i];
  }
  return v;
}

template <std::size_t N>
std::vector<ConditionTree> parse_table(const std::array<ConditionSpec, N>& specs) {
  std::vector<ConditionTree> out;
  out.reserve(N);
  for (const auto& spec : specs) out.push_back(parse_condition(spec.expression));
  return out;
}

}  // namespace detail

/// Left-hand side sum_i weights_i * value(root)_i. Cost O(vertices * s^2).
inline double evaluate_condition(const ConditionTree& tree, const ConditionMatrices& m,
                                 std::span<const double> weights) {
  const auto root = detail::vertex_value(tree, m, 0, weights.size());
  return dot(weights, root);
}

enum class ConditionFamily { row, half_explicit };

inline std::span<const ConditionSpec> condition_specs(ConditionFamily family) {
  if (family == ConditionFamily::row) return kRowConditionTable;
  return kHalfExplicitConditionTable;
}

inline const std::vector<ConditionTree>& condition_trees(ConditionFamily family) {
  static const auto row = detail::parse_table(kRowConditionTable);
  static const auto half = detail::parse_table(kHalfExplicitConditionTable);
  return family == ConditionFamily::row ? row : half;
}

struct ConditionResidual {
  int index;
  int order;
  bool uses_w;
  double lhs;
  double rhs;
  double residual;
};

inline constexpr double kDefaultConditionTolerance = 1e-9;

struct ConditionReport {
  ConditionFamily family;
  std::vector<ConditionResidual> residuals;

  int max_order() const {
    int p = 0;
    for (const auto& r : residuals) p = std::max(p, r.order);
    return p;
  }

  std::map<int, double> max_residual_by_order() const {
    std::map<int, double> out;
    for (const auto& r : residuals) out[r.order] = std::max(out[r.order], r.residual);
    return out;
  }

  /// Largest p such that every condition of order <= p holds within tol.
  int attained_order(double tol = kDefaultConditionTolerance) const {
    return attained(tol, false);
  }

  /// Same rule restricted to conditions without a w factor, i.e. the
  /// conditions seen by a pure ODE.
  int attained_ode_order(double tol = kDefaultConditionTolerance) const {
    return attained(tol, true);
  }

  const ConditionResidual& at(int index) const {
    return residuals.at(static_cast<std::size_t>(index - 1));
  }

private:
  int attained(double tol, bool ode_only) const {
    const int top = max_order();
    for (int p = 1; p <= top; ++p) {
      for (const auto& r : residuals) {
        if (r.order != p || (ode_only && r.uses_w)) continue;
        if (!(r.residual <= tol)) return p - 1;
      }
    }
    return top;
  }
};

inline ConditionReport condition_residuals(ConditionFamily family, const RowTableau& t,
                                           std::span<const double> weights) {
  if (weights.size() != t.stages()) {
    throw DimensionMismatch("condition_residuals: weights must have s entries");
  }
  const auto mats = condition_matrices(t);
  const auto specs = condition_specs(family);
  const auto& trees = condition_trees(family);
  ConditionReport report{family, {}};
  report.residuals.reserve(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const double lhs = evaluate_condition(trees[k], mats, weights);
    const double rhs = static_cast<double>(specs[k].rhs_num) / specs[k].rhs_den;
    report.residuals.push_back(
        {specs[k].index, trees[k].order, trees[k].uses_w, lhs, rhs, std::abs(lhs - rhs)});
  }
  return report;
}

/// The 130 conditions of the linearly implicit scheme up to order 6.
inline ConditionReport row_condition_residuals(const RowTableau& t) {
  return condition_residuals(ConditionFamily::row, t, t.b());
}
inline ConditionReport row_condition_residuals(const RowTableau& t,
                                               std::span<const double> weights) {
  return condition_residuals(ConditionFamily::row, t, weights);
}

/// The 63 conditions of the half-explicit scheme up to order 5.
inline ConditionReport half_explicit_condition_residuals(const RowTableau& t) {
  return condition_residuals(ConditionFamily::half_explicit, t, t.b());
}
inline ConditionReport half_explicit_condition_residuals(const RowTableau& t,
                                                         std::span<const double> weights) {
  return condition_residuals(ConditionFamily::half_explicit, t, weights);
}

/// |sum_j w_ij alpha_j^2 - 2 alpha_i| for i = 2..s.
inline Vector simplifying_residuals(const RowTableau& t) {
  const std::size_t s = t.stages();
  if (s < 2) return {};
  const auto w = w_matrix(t);
  const auto& a = t.alpha_sums();
  const auto lhs = matvec(w, hadamard(a, a));
  Vector out;
  out.reserve(s - 1);
  for (std::size_t i = 1; i < s; ++i) out.push_back(std::abs(lhs[i] - 2.0 * a[i]));
  return out;
}

/// R(z) = 1 + z b^T (I - z beta)^{-1} 1, via forward substitution on the
/// lower-triangular system.
inline std::complex<double> stability_function(const RowTableau& t, std::complex<double> z) {
  const std::size_t s = t.stages();
  const auto& beta = t.beta();
  std::vector<std::complex<double>> x(s);
  for (std::size_t i = 0; i < s; ++i) {
    std::complex<double> acc = 1.0;
    for (std::size_t j = 0; j < i; ++j) acc += z * beta(i, j) * x[j];
    const std::complex<double> diag = 1.0 - z * beta(i, i);
    if (std::abs(diag) <= kSingularityThreshold * std::max(1.0, std::abs(z * beta(i, i)))) {
      throw SingularMatrix("stability_function: I - z*beta is singular");
    }
    x[i] = acc / diag;
  }
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < s; ++i) sum += t.b()[i] * x[i];
  return 1.0 + z * sum;
}

/// |R(infinity)| = |1 - b^T W 1|.
inline double r_infinity(const RowTableau& t) {
  const auto w = w_matrix(t);
  const Vector ones(t.stages(), 1.0);
  return std::abs(1.0 - dot(t.b(), matvec(w, ones)));
}

}  // namespace rowdae
