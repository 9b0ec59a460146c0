// English (Porter2) Snowball stemmer.

#include <array>

#include "palimpsest/stemmer.hpp"
#include "snowball.hpp"

namespace palimpsest {

namespace {

using snowball::Among;
using snowball::Env;

constexpr std::u32string_view kV = U"aeiouy";
constexpr std::u32string_view kVWXY = U"aeiouywxY";
constexpr std::u32string_view kValidLi = U"cdeghkmnrt";

constexpr std::u32string_view kAEO = U"aeo";

constexpr std::array<Among, 9> kR1Prefixes = {{
    {U"arsen", -1}, {U"commun", -1}, {U"emerg", -1}, {U"gener", -1}, {U"inter", -1},
    {U"later", -1}, {U"organ", -1},  {U"past", -1},  {U"univers", -1},
}};

constexpr std::array<Among, 3> kApostrophe = {{{U"'", 1}, {U"'s'", 1}, {U"'s", 1}}};

constexpr std::array<Among, 6> kStep1a = {{
    {U"ied", 2}, {U"s", 3}, {U"ies", 2}, {U"sses", 1}, {U"ss", -1}, {U"us", -1},
}};

constexpr std::array<Among, 13> kStep1bTail = {{
    {U"", 3},   {U"bb", 2}, {U"dd", 2}, {U"ff", 2}, {U"gg", 2}, {U"bl", 1}, {U"mm", 2},
    {U"nn", 2}, {U"pp", 2}, {U"rr", 2}, {U"at", 1}, {U"tt", 2}, {U"iz", 1},
}};

constexpr std::array<Among, 7> kStep1b = {{
    {U"", -1}, {U"ed", 2}, {U"eed", 1}, {U"ing", 3}, {U"edly", 2}, {U"eedly", 1}, {U"ingly", 2},
}};

// Whole stems before "eed" that keep it.
constexpr std::array<Among, 3> kEedKeep = {{{U"succ", 1}, {U"proc", 1}, {U"exc", 1}}};

// Stems before "ing": "y" (dying -> die) and whole stems that keep it.
constexpr std::array<Among, 7> kIngSpecial = {{
    {U"even", 2}, {U"cann", 2}, {U"inn", 2}, {U"earr", 2}, {U"herr", 2}, {U"out", 2}, {U"y", 1},
}};

constexpr std::array<Among, 25> kStep2 = {{
    {U"anci", 3},     {U"enci", 2},    {U"ogi", 14},    {U"li", 16},      {U"bli", 12},
    {U"abli", 4},     {U"alli", 8},    {U"fulli", 9},   {U"lessli", 15},  {U"ousli", 10},
    {U"entli", 5},    {U"aliti", 8},   {U"biliti", 12}, {U"iviti", 11},   {U"tional", 1},
    {U"ational", 7},  {U"alism", 8},   {U"ation", 7},   {U"ization", 6},  {U"izer", 6},
    {U"ator", 7},     {U"iveness", 11}, {U"fulness", 9}, {U"ousness", 10}, {U"ogist", 13},
}};

constexpr std::array<std::u32string_view, 15> kStep2Replacement = {
    U"tion", U"ence", U"ance", U"able", U"ent", U"ize", U"ate", U"al",
    U"ful",  U"ous",  U"ive",  U"ble",  U"og",  U"og",  U"less",
};

constexpr std::array<Among, 9> kStep3 = {{
    {U"icate", 4}, {U"ative", 6},   {U"alize", 3}, {U"iciti", 4}, {U"ical", 4},
    {U"tional", 1}, {U"ational", 2}, {U"ful", 5},   {U"ness", 5},
}};

constexpr std::array<std::u32string_view, 4> kStep3Replacement = {U"tion", U"ate", U"al", U"ic"};

constexpr std::array<Among, 18> kStep4 = {{
    {U"ic", 1},  {U"ance", 1}, {U"ence", 1}, {U"able", 1}, {U"ible", 1}, {U"ate", 1},
    {U"ive", 1}, {U"ize", 1},  {U"iti", 1},  {U"al", 1},   {U"ism", 1},  {U"ion", 2},
    {U"er", 1},  {U"ous", 1},  {U"ant", 1},  {U"ent", 1},  {U"ment", 1}, {U"ement", 1},
}};

constexpr std::array<Among, 2> kStep5 = {{{U"e", 1}, {U"l", 2}}};

constexpr std::array<Among, 15> kWholeWord = {{
    {U"andes", -1}, {U"atlas", -1}, {U"bias", -1},   {U"cosmos", -1}, {U"early", 6},
    {U"gently", 4}, {U"howe", -1},  {U"idly", 3},    {U"news", -1},   {U"only", 7},
    {U"singly", 8}, {U"skies", 2},  {U"skis", 1},    {U"sky", -1},    {U"ugly", 5},
}};

constexpr std::array<std::u32string_view, 8> kWholeWordReplacement = {
    U"ski", U"sky", U"idl", U"gentl", U"ugli", U"earli", U"onli", U"singl",
};

bool is_v(char32_t c) { return kV.find(c) != std::u32string_view::npos; }

class EnglishStemmer {
 public:
  explicit EnglishStemmer(std::u32string word) : env_(std::move(word)) {}

  std::u32string run() {
    Env& z = env_;
    if (whole_word()) return std::move(z.current);
    if (z.limit < 3) return std::move(z.current);

    prelude();
    mark_regions();
    z.limit_backward = 0;
    z.cursor = z.limit;
    step_1a();
    z.cursor = z.limit;
    step_1b();
    z.cursor = z.limit;
    step_1c();
    z.cursor = z.limit;
    step_2();
    z.cursor = z.limit;
    step_3();
    z.cursor = z.limit;
    step_4();
    z.cursor = z.limit;
    step_5();
    if (y_found_) {
      for (char32_t& c : z.current) {
        if (c == U'Y') c = U'y';
      }
    }
    return std::move(z.current);
  }

 private:
  bool in_r1() const { return p1_ <= env_.cursor; }
  bool in_r2() const { return p2_ <= env_.cursor; }

  bool whole_word() {
    Env& z = env_;
    z.cursor = 0;
    z.bra = 0;
    const int among = z.find_among(kWholeWord);
    if (among == 0 || z.cursor < z.limit) {
      z.cursor = 0;
      return false;
    }
    z.ket = z.cursor;
    if (among > 0) z.slice_from(kWholeWordReplacement[static_cast<std::size_t>(among - 1)]);
    return true;
  }

  void prelude() {
    Env& z = env_;
    if (z.limit > 0 && z.at(0) == U'\'') {
      z.bra = 0;
      z.ket = 1;
      z.slice_del();
    }
    if (z.limit > 0 && z.at(0) == U'y') {
      z.current[0] = U'Y';
      y_found_ = true;
    }
    for (int i = 0; i + 1 < z.limit; ++i) {
      if (is_v(z.at(i)) && z.at(i + 1) == U'y') {
        z.current[static_cast<std::size_t>(i + 1)] = U'Y';
        y_found_ = true;
      }
    }
    z.cursor = 0;
  }

  void mark_regions() {
    Env& z = env_;
    p1_ = p2_ = z.limit;
    z.cursor = 0;
    if (z.find_among(kR1Prefixes) == 0) {
      z.cursor = 0;
      if (!z.go_out_grouping(kV)) return;
      ++z.cursor;
      if (!z.go_in_grouping(kV)) return;
      ++z.cursor;
    }
    p1_ = z.cursor;
    if (z.go_out_grouping(kV)) {
      ++z.cursor;
      if (z.go_in_grouping(kV)) {
        ++z.cursor;
        p2_ = z.cursor;
      }
    }
    z.cursor = 0;
  }

  // A short syllable ending at the cursor.
  bool shortv() {
    Env& z = env_;
    const int at = z.cursor;
    if (z.out_grouping_b(kVWXY) && z.in_grouping_b(kV) && z.out_grouping_b(kV)) return true;
    z.cursor = at;
    if (z.out_grouping_b(kV) && z.in_grouping_b(kV) && z.cursor <= z.limit_backward) return true;
    z.cursor = at;
    return z.eq_s_b(U"past");
  }

  void step_1a() {
    Env& z = env_;
    z.ket = z.cursor;
    if (z.find_among_b(kApostrophe) != 0) {
      z.bra = z.cursor;
      z.slice_del();
    } else {
      z.cursor = z.limit;
    }
    z.ket = z.cursor;
    const int among = z.find_among_b(kStep1a);
    if (among == 0) return;
    z.bra = z.cursor;
    if (among == 1) {
      z.slice_from(U"ss");
    } else if (among == 2) {
      if (z.cursor - 2 >= z.limit_backward) {
        z.slice_from(U"i");
      } else {
        z.slice_from(U"ie");
      }
    } else if (among == 3) {
      if (z.cursor <= z.limit_backward) return;
      --z.cursor;
      if (!z.go_out_grouping_b(kV)) return;
      z.slice_del();
    }
  }

  void step_1b() {
    Env& z = env_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kStep1b);
    z.bra = z.cursor;
    const int suffix_start = z.cursor;
    if (among == 1) {
      if (in_r1()) {
        const bool keep = z.find_among_b(kEedKeep) != 0 && z.cursor <= z.limit_backward;
        z.cursor = suffix_start;
        if (!keep) z.slice_from(U"ee");
      }
      return;
    }
    if (among == 3) {
      const int special = z.find_among_b(kIngSpecial);
      if (special == 1) {
        const int at = z.cursor;
        if (z.out_grouping_b(kV) && z.cursor <= z.limit_backward) {
          z.cursor = at;
          z.bra = z.cursor;
          z.slice_from(U"ie");
          return;
        }
      } else if (special == 2 && z.cursor <= z.limit_backward) {
        return;
      }
      z.cursor = suffix_start;
    } else if (among != 2) {
      return;
    }

    if (!z.go_out_grouping_b(kV)) return;
    z.cursor = suffix_start;
    z.slice_del();

    const int end = z.cursor;
    z.ket = z.bra = end;
    const int tail = z.find_among_b(kStep1bTail);
    if (tail == 1) {
      z.slice_from(U"e");
      return;
    }
    if (tail == 2) {
      if (z.in_grouping_b(kAEO) && z.cursor <= z.limit_backward) return;
      z.cursor = end;
      z.ket = z.cursor;
      if (z.cursor <= z.limit_backward) return;
      --z.cursor;
      z.bra = z.cursor;
      z.slice_del();
      return;
    }
    z.cursor = end;
    if (z.cursor != p1_) return;
    if (!shortv()) return;
    z.cursor = end;
    z.slice_from(U"e");
  }

  void step_1c() {
    Env& z = env_;
    z.ket = z.cursor;
    if (!z.eq_s_b(U"y") && !z.eq_s_b(U"Y")) return;
    z.bra = z.cursor;
    if (!z.out_grouping_b(kV)) return;
    if (z.cursor <= z.limit_backward) return;
    z.slice_from(U"i");
  }

  void step_2() {
    Env& z = env_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kStep2);
    if (among == 0) return;
    z.bra = z.cursor;
    if (!in_r1()) return;
    if (among == 14) {
      if (!z.eq_s_b(U"l")) return;
      z.slice_from(U"og");
    } else if (among == 16) {
      if (!z.in_grouping_b(kValidLi)) return;
      z.slice_del();
    } else {
      z.slice_from(kStep2Replacement[static_cast<std::size_t>(among - 1)]);
    }
  }

  void step_3() {
    Env& z = env_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kStep3);
    if (among == 0) return;
    z.bra = z.cursor;
    if (!in_r1()) return;
    if (among <= 4) {
      z.slice_from(kStep3Replacement[static_cast<std::size_t>(among - 1)]);
    } else if (among == 5) {
      z.slice_del();
    } else if (in_r2()) {
      z.slice_del();
    }
  }

  void step_4() {
    Env& z = env_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kStep4);
    if (among == 0) return;
    z.bra = z.cursor;
    if (!in_r2()) return;
    if (among == 2 && !z.eq_s_b(U"s") && !z.eq_s_b(U"t")) return;
    z.slice_del();
  }

  void step_5() {
    Env& z = env_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kStep5);
    if (among == 0) return;
    z.bra = z.cursor;
    if (among == 1) {
      if (!in_r2()) {
        if (!in_r1()) return;
        const int at = z.cursor;
        if (shortv()) return;
        z.cursor = at;
      }
      z.slice_del();
    } else {
      if (!in_r2() || !z.eq_s_b(U"l")) return;
      z.slice_del();
    }
  }

  Env env_;
  int p1_ = 0;
  int p2_ = 0;
  bool y_found_ = false;
};

}  // namespace

std::u32string stem_english(std::u32string word) {
  return EnglishStemmer(std::move(word)).run();
}

}  // namespace palimpsest
