// French Snowball stemmer.

#include <array>

#include "palimpsest/stemmer.hpp"
#include "snowball.hpp"

namespace palimpsest {

namespace {

using snowball::Among;
using snowball::Env;

constexpr std::u32string_view kVowels = U"aeiouyâàëéêèïîôûù";
constexpr std::u32string_view kKeepWithS = U"aiouès";
constexpr std::u32string_view kOuxEnding = U"bhjlnp";
constexpr std::u32string_view kElisionChars = U"cdjlmnst";

constexpr std::array<Among, 4> kRvPrefixes = {{
    {U"col", -1}, {U"ni", 1}, {U"par", -1}, {U"tap", -1},
}};

constexpr std::array<Among, 7> kPostlude = {{
    {U"", 7}, {U"H", 6}, {U"He", 4}, {U"Hi", 5}, {U"I", 1}, {U"U", 2}, {U"Y", 3},
}};

constexpr std::array<Among, 6> kAfterEment = {{
    {U"iqU", 3}, {U"abl", 3}, {U"Ièr", 4}, {U"ièr", 4}, {U"eus", 2}, {U"iv", 1},
}};

constexpr std::array<Among, 3> kAfterIte = {{{U"ic", 2}, {U"abil", 1}, {U"iv", 3}}};

constexpr std::array<Among, 44> kStandard = {{
    {U"iqUe", 1},     {U"atrice", 2},    {U"ance", 1},     {U"ence", 5},
    {U"logie", 3},    {U"able", 1},      {U"isme", 1},     {U"euse", 12},
    {U"iste", 1},     {U"ive", 8},       {U"if", 8},       {U"usion", 4},
    {U"ation", 2},    {U"ution", 4},     {U"ateur", 2},    {U"iqUes", 1},
    {U"atrices", 2},  {U"ances", 1},     {U"ences", 5},    {U"logies", 3},
    {U"ables", 1},    {U"ismes", 1},     {U"euses", 12},   {U"istes", 1},
    {U"ives", 8},     {U"ifs", 8},       {U"usions", 4},   {U"ations", 2},
    {U"utions", 4},   {U"ateurs", 2},    {U"ments", 16},   {U"ements", 6},
    {U"issements", 13}, {U"ités", 7},    {U"ment", 16},    {U"ement", 6},
    {U"issement", 13}, {U"amment", 14},  {U"emment", 15},  {U"aux", 10},
    {U"eaux", 9},     {U"eux", 1},       {U"oux", 11},     {U"ité", 7},
}};

constexpr std::array<Among, 35> kIVerb = {{
    {U"ira", 1},    {U"ie", 1},      {U"isse", 1},    {U"issante", 1}, {U"i", 1},
    {U"irai", 1},   {U"ir", 1},      {U"iras", 1},    {U"ies", 1},     {U"îmes", 1},
    {U"isses", 1},  {U"issantes", 1}, {U"îtes", 1},   {U"is", 1},      {U"irais", 1},
    {U"issais", 1}, {U"irions", 1},  {U"issions", 1}, {U"irons", 1},   {U"issons", 1},
    {U"issants", 1}, {U"it", 1},     {U"irait", 1},   {U"issait", 1},  {U"issant", 1},
    {U"iraIent", 1}, {U"issaIent", 1}, {U"irent", 1}, {U"issent", 1},  {U"iront", 1},
    {U"ît", 1},     {U"iriez", 1},   {U"issiez", 1},  {U"irez", 1},    {U"issez", 1},
}};

constexpr std::array<Among, 41> kVerb = {{
    {U"a", 3},      {U"era", 2},    {U"aise", 4},   {U"asse", 3},    {U"ante", 3},
    {U"ée", 2},     {U"ai", 3},     {U"erai", 2},   {U"er", 2},      {U"as", 3},
    {U"eras", 2},   {U"âmes", 3},   {U"aises", 4},  {U"asses", 3},   {U"antes", 3},
    {U"âtes", 3},   {U"ées", 2},    {U"ais", 4},    {U"eais", 2},    {U"erais", 2},
    {U"ions", 1},   {U"erions", 2}, {U"assions", 3}, {U"erons", 2},  {U"ants", 3},
    {U"és", 2},     {U"ait", 3},    {U"erait", 2},  {U"ant", 3},     {U"aIent", 3},
    {U"eraIent", 2}, {U"èrent", 2}, {U"assent", 3}, {U"eront", 2},   {U"ât", 3},
    {U"ez", 2},     {U"iez", 2},    {U"eriez", 2},  {U"assiez", 3},  {U"erez", 2},
    {U"é", 2},
}};

// Stems before "ais" that keep it.
constexpr std::array<Among, 3> kAisKeep = {{{U"al", 1}, {U"épl", -1}, {U"auv", -1}}};

constexpr std::array<Among, 6> kResidual = {{
    {U"e", 3}, {U"Ière", 2}, {U"ière", 2}, {U"ion", 1}, {U"Ier", 2}, {U"ier", 2},
}};

constexpr std::array<Among, 5> kDoubles = {{
    {U"ell", -1}, {U"eill", -1}, {U"enn", -1}, {U"onn", -1}, {U"ett", -1},
}};

bool is_vowel(char32_t c) { return kVowels.find(c) != std::u32string_view::npos; }

class FrenchStemmer {
 public:
  explicit FrenchStemmer(std::u32string word) : env_(std::move(word)) {}

  std::u32string run() {
    elisions();
    prelude();
    mark_regions();

    Env& z = env_;
    z.limit_backward = 0;
    z.cursor = z.limit;
    bool changed = standard_suffix();
    if (!changed) {
      z.cursor = z.limit;
      changed = i_verb_suffix();
    }
    if (!changed) {
      z.cursor = z.limit;
      changed = verb_suffix();
    }
    z.cursor = z.limit;
    if (changed) {
      z.ket = z.cursor;
      if (z.eq_s_b(U"Y")) {
        z.bra = z.cursor;
        z.slice_from(U"i");
      } else if (z.eq_s_b(U"ç")) {
        z.bra = z.cursor;
        z.slice_from(U"c");
      }
    } else {
      residual_suffix();
    }
    z.cursor = z.limit;
    un_double();
    z.cursor = z.limit;
    un_accent();
    z.cursor = z.limit_backward;
    postlude();
    return std::move(z.current);
  }

 private:
  bool in_rv() const { return pv_ <= env_.cursor; }
  bool in_r1() const { return p1_ <= env_.cursor; }
  bool in_r2() const { return p2_ <= env_.cursor; }

  // Drops a leading elided article or pronoun ("l'", "qu'").
  void elisions() {
    Env& z = env_;
    z.cursor = 0;
    if (!z.in_grouping(kElisionChars) && !z.eq_s(U"qu")) return;
    if (!z.eq_s(U"'") || z.cursor >= z.limit) return;
    z.bra = 0;
    z.ket = z.cursor;
    z.slice_del();
    z.cursor = 0;
  }

  // Marks vowel-like u, i, y as consonants (U, I, Y), u after q, and
  // rewrites diaeresis vowels as H-prefixed pairs.
  bool prelude_at(int p) {
    Env& z = env_;
    const int n = z.limit;
    auto ch = [&](int i) { return i < n ? z.at(i) : U'\0'; };
    auto mark = [&](int at, std::u32string_view with, int len) {
      z.bra = at;
      z.ket = at + len;
      z.slice_from(with);
    };
    if (p < n && is_vowel(ch(p)) && p + 1 < n) {
      char32_t next = ch(p + 1);
      bool vowel_after = p + 2 < n && is_vowel(ch(p + 2));
      if (next == U'u' && vowel_after) return mark(p + 1, U"U", 1), true;
      if (next == U'i' && vowel_after) return mark(p + 1, U"I", 1), true;
      if (next == U'y') return mark(p + 1, U"Y", 1), true;
    }
    if (ch(p) == U'ë') return mark(p, U"He", 1), true;
    if (ch(p) == U'ï') return mark(p, U"Hi", 1), true;
    if (ch(p) == U'y' && p + 1 < n && is_vowel(ch(p + 1))) return mark(p, U"Y", 1), true;
    if (ch(p) == U'q' && p + 1 < n && ch(p + 1) == U'u') return mark(p + 1, U"U", 1), true;
    return false;
  }

  void prelude() {
    int p = 0;
    while (p < env_.limit) {
      if (!prelude_at(p)) ++p;
    }
  }

  void mark_regions() {
    Env& z = env_;
    pv_ = p1_ = p2_ = z.limit;

    z.cursor = 0;
    if (z.limit >= 3 && is_vowel(z.at(0)) && is_vowel(z.at(1))) {
      pv_ = 3;
    } else if (const int among = z.find_among(kRvPrefixes);
               among != 0 && (among != 1 || z.in_grouping(kVowels))) {
      pv_ = z.cursor;
    } else {
      z.cursor = 1;
      if (z.limit >= 1 && z.go_out_grouping(kVowels)) pv_ = z.cursor + 1;
    }

    z.cursor = 0;
    if (z.go_out_grouping(kVowels)) {
      ++z.cursor;
      if (z.go_in_grouping(kVowels)) {
        ++z.cursor;
        p1_ = z.cursor;
        if (z.go_out_grouping(kVowels)) {
          ++z.cursor;
          if (z.go_in_grouping(kVowels)) {
            ++z.cursor;
            p2_ = z.cursor;
          }
        }
      }
    }
    z.cursor = 0;
  }

  // Replaces an "ic" just before the cursor: deleted inside R2, else "iqU".
  void strip_ic() {
    Env& z = env_;
    z.ket = z.cursor;
    if (!z.eq_s_b(U"ic")) return;
    z.bra = z.cursor;
    if (in_r2()) {
      z.slice_del();
    } else {
      z.slice_from(U"iqU");
    }
  }

  bool standard_suffix() {
    Env& z = env_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kStandard);
    if (among == 0) return false;
    z.bra = z.cursor;
    switch (among) {
      case 1:
        if (!in_r2()) return false;
        z.slice_del();
        break;
      case 2:
        if (!in_r2()) return false;
        z.slice_del();
        strip_ic();
        break;
      case 3:
        if (!in_r2()) return false;
        z.slice_from(U"log");
        break;
      case 4:
        if (!in_r2()) return false;
        z.slice_from(U"u");
        break;
      case 5:
        if (!in_r2()) return false;
        z.slice_from(U"ent");
        break;
      case 6: {
        if (!in_rv()) return false;
        z.slice_del();
        z.ket = z.cursor;
        const int sub = z.find_among_b(kAfterEment);
        if (sub == 0) break;
        z.bra = z.cursor;
        if (sub == 1) {
          if (!in_r2()) break;
          z.slice_del();
          z.ket = z.cursor;
          if (!z.eq_s_b(U"at")) break;
          z.bra = z.cursor;
          if (!in_r2()) break;
          z.slice_del();
        } else if (sub == 2) {
          if (in_r2()) {
            z.slice_del();
          } else if (in_r1()) {
            z.slice_from(U"eux");
          }
        } else if (sub == 3) {
          if (in_r2()) z.slice_del();
        } else {
          if (in_rv()) z.slice_from(U"i");
        }
        break;
      }
      case 7: {
        if (!in_r2()) return false;
        z.slice_del();
        z.ket = z.cursor;
        const int sub = z.find_among_b(kAfterIte);
        if (sub == 0) break;
        z.bra = z.cursor;
        if (sub == 1) {
          if (in_r2()) {
            z.slice_del();
          } else {
            z.slice_from(U"abl");
          }
        } else if (sub == 2) {
          if (in_r2()) {
            z.slice_del();
          } else {
            z.slice_from(U"iqU");
          }
        } else {
          if (in_r2()) z.slice_del();
        }
        break;
      }
      case 8:
        if (!in_r2()) return false;
        z.slice_del();
        z.ket = z.cursor;
        if (!z.eq_s_b(U"at")) break;
        z.bra = z.cursor;
        if (!in_r2()) break;
        z.slice_del();
        strip_ic();
        break;
      case 9:
        z.slice_from(U"eau");
        break;
      case 10:
        if (!in_r1()) return false;
        z.slice_from(U"al");
        break;
      case 11:
        if (!z.in_grouping_b(kOuxEnding)) return false;
        z.slice_from(U"ou");
        break;
      case 12:
        if (in_r2()) {
          z.slice_del();
        } else if (in_r1()) {
          z.slice_from(U"eux");
        } else {
          return false;
        }
        break;
      case 13:
        if (!in_r1() || !z.out_grouping_b(kVowels)) return false;
        z.slice_del();
        break;
      // The three cases below alter the word and then report failure, so that
      // the verb suffix steps still get a chance on the rewritten form.
      case 14:
        if (in_rv()) z.slice_from(U"ant");
        return false;
      case 15:
        if (in_rv()) z.slice_from(U"ent");
        return false;
      default: {
        const int at = z.cursor;
        if (z.in_grouping_b(kVowels) && in_rv()) {
          z.cursor = at;
          z.slice_del();
        }
        return false;
      }
    }
    return true;
  }

  bool i_verb_suffix() {
    Env& z = env_;
    if (z.cursor < pv_) return false;
    const int saved = z.limit_backward;
    z.limit_backward = pv_;
    z.ket = z.cursor;
    bool ok = z.find_among_b(kIVerb) != 0;
    if (ok) {
      z.bra = z.cursor;
      const int at = z.cursor;
      if (z.eq_s_b(U"H")) {
        ok = false;
      } else {
        z.cursor = at;
        ok = z.out_grouping_b(kVowels);
        if (ok) z.slice_del();
      }
    }
    z.limit_backward = saved;
    return ok;
  }

  bool verb_suffix() {
    Env& z = env_;
    if (z.cursor < pv_) return false;
    const int saved = z.limit_backward;
    z.limit_backward = pv_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kVerb);
    z.limit_backward = saved;
    if (among == 0) return false;
    z.bra = z.cursor;
    switch (among) {
      case 1:
        if (!in_r2()) return false;
        z.slice_del();
        break;
      case 2:
        z.slice_del();
        break;
      case 3: {
        const int at = z.cursor;
        if (z.cursor > z.limit_backward && z.at(z.cursor - 1) == U'e') {
          --z.cursor;
          if (in_rv()) {
            z.bra = z.cursor;
          } else {
            z.cursor = at;
          }
        }
        z.slice_del();
        break;
      }
      default: {
        const int at = z.cursor;
        const int keep = z.find_among_b(kAisKeep);
        if (keep < 0) return false;
        if (keep == 1 && z.cursor - 1 == z.limit_backward) return false;
        z.cursor = at;
        z.slice_del();
      }
    }
    return true;
  }

  void residual_suffix() {
    Env& z = env_;
    const int end = z.cursor;
    z.ket = z.cursor;
    if (z.eq_s_b(U"s")) {
      z.bra = z.cursor;
      const int at = z.cursor;
      bool keep = false;
      if (z.eq_s_b(U"Hi")) {
        keep = true;
      } else {
        z.cursor = at;
        keep = z.out_grouping_b(kKeepWithS);
      }
      z.cursor = at;
      if (keep) {
        z.slice_del();
      } else {
        z.cursor = end;
      }
    } else {
      z.cursor = end;
    }

    if (z.cursor < pv_) return;
    const int saved = z.limit_backward;
    z.limit_backward = pv_;
    z.ket = z.cursor;
    const int among = z.find_among_b(kResidual);
    if (among != 0) {
      z.bra = z.cursor;
      if (among == 1) {
        if (in_r2()) {
          const int at = z.cursor;
          bool st = z.eq_s_b(U"s");
          if (!st) {
            z.cursor = at;
            st = z.eq_s_b(U"t");
          }
          if (st) z.slice_del();
        }
      } else if (among == 2) {
        z.slice_from(U"i");
      } else {
        z.slice_del();
      }
    }
    z.limit_backward = saved;
  }

  void un_double() {
    Env& z = env_;
    const int end = z.cursor;
    if (z.find_among_b(kDoubles) == 0) return;
    z.cursor = end;
    z.ket = z.cursor;
    if (z.cursor <= z.limit_backward) return;
    --z.cursor;
    z.bra = z.cursor;
    z.slice_del();
  }

  void un_accent() {
    Env& z = env_;
    int consonants = 0;
    while (z.out_grouping_b(kVowels)) ++consonants;
    if (consonants == 0) return;
    z.ket = z.cursor;
    if (z.eq_s_b(U"é") || z.eq_s_b(U"è")) {
      z.bra = z.cursor;
      z.slice_from(U"e");
    }
  }

  void postlude() {
    Env& z = env_;
    while (true) {
      z.bra = z.cursor;
      const int among = z.find_among(kPostlude);
      if (among == 0) break;
      z.ket = z.cursor;
      switch (among) {
        case 1: z.slice_from(U"i"); break;
        case 2: z.slice_from(U"u"); break;
        case 3: z.slice_from(U"y"); break;
        case 4: z.slice_from(U"ë"); break;
        case 5: z.slice_from(U"ï"); break;
        case 6: z.slice_del(); break;
        default:
          if (z.cursor >= z.limit) return;
          ++z.cursor;
      }
    }
  }

  Env env_;
  int pv_ = 0;
  int p1_ = 0;
  int p2_ = 0;
};

}  // namespace

std::u32string stem_french(std::u32string word) {
  return FrenchStemmer(std::move(word)).run();
}

}  // namespace palimpsest
