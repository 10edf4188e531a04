// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance <path-to-botsim-cli>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "botsim/cli.hpp"
#include "oracles.hpp"

using namespace botsim;

namespace {

const std::string kCI = "Check_the_status_of_an_existing_issue";
const std::string kCO = "Check_Order_Status";
const std::string kData = BOTSIM_DATA_DIR;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Check()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.ok && secs > budget_s) {
    c.ok = false;
    c.detail = "took " + std::to_string(secs) + " s, budget " + std::to_string(budget_s) + " s";
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::cout << (c.ok ? "PASS " : "FAIL ") << name << " [" << timing << "]";
  if (!c.detail.empty()) std::cout << " " << c.detail;
  std::cout << std::endl;
  if (!c.ok) ++failures;
}

std::shared_ptr<const BotDefinition> template_bot() {
  static const auto def = std::make_shared<const BotDefinition>(load_bot_definition_file(kData + "/template_bot.json"));
  return def;
}

DialogActMaps approved_maps(const BotDefinition& def) {
  auto maps = parse_bot(def).global_maps;
  for (auto& [_, m] : maps)
    for (const auto& a : std::vector<std::string>(m.needs_review())) m.clear_review(a);
  return maps;
}

oracle::ActList as_list(const DialogActMap& m) {
  oracle::ActList out;
  for (const auto& a : m.acts()) out.push_back({a.name, a.variants});
  return out;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int sh(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <botsim-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const auto work = fs::temp_directory_path() / ("botsim_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  criterion("ibleu_reproduces_table", 1.0, [] {
    // (target, self, printed iBLEU) for the four consistent models on both corpora
    const double rows[8][3] = {{31.4, 55.3, 14.0}, {23.8, 46.0, 9.9},  {39.5, 33.0, 24.9}, {30.5, 40.2, 16.4},
                               {42.7, 42.7, 25.6}, {14.9, 20.0, 7.9},  {32.3, 46.8, 16.5}, {31.9, 42.7, 17.0}};
    // inputs and outputs are printed to 1 d.p.: 0.05 + 0.8*0.05 + 0.2*0.05
    const double tol = 0.10 + 1e-9;
    Check c;
    double worst = 0;
    for (const auto& r : rows) {
      const double got = ibleu(r[0], r[1]);
      const double rounded = std::round(got * 10) / 10;
      worst = std::max(worst, std::fabs(rounded - r[2]));
      c.expect(std::fabs(rounded - r[2]) <= tol, "ibleu(" + fmt(r[0], 1) + ", " + fmt(r[1], 1) + ") = " + fmt(got, 2) +
                                                    " vs " + fmt(r[2], 1));
    }
    c.expect(std::fabs(ibleu(42.7, 42.7) - 25.62) < 1e-9, "ibleu(42.7, 42.7) != 25.62");
    if (c.ok) c.detail = "8 cells, max |rounded - printed| = " + fmt(worst, 2);
    return c;
  });

  criterion("global_maps_match_path_union_oracle", 30.0, [] {
    std::mt19937_64 rng(2023);
    Check c;
    std::size_t dialogs = 0;
    for (int trial = 0; trial < 200 && c.ok; ++trial) {
      const auto def = oracle::random_definition(rng);
      const auto global = build_global_maps(build_local_maps(def), build_graph(def));
      for (const auto& d : def.dialogs) {
        ++dialogs;
        c.expect(as_list(global.at(d.name)) == oracle::global_acts(def, d.name),
                 "definition " + std::to_string(trial) + " dialog " + d.name);
      }
    }
    if (c.ok) c.detail = "200 definitions, " + std::to_string(dialogs) + " dialogs";
    return c;
  });

  criterion("zero_fault_closed_loop", 60.0, [] {
    const auto def = template_bot();
    const auto maps = approved_maps(*def);
    const auto goals = generate_all_goals(*def, maps, generate_ontology(*def, 1), 10, 1, false);
    SimConfig cfg;
    cfg.seed = 1;
    const auto r = run_session(make_mock_factory(def, FaultProfile{}), goals, maps, default_templates(), cfg);
    Check c;
    c.expect(def->intents.size() == 6, "template bot has " + std::to_string(def->intents.size()) + " intents");
    c.expect(goals.size() == 600, std::to_string(goals.size()) + " goals");
    const auto ok = r.counts.at("Success");
    c.expect(ok == goals.size(), "success " + std::to_string(ok) + "/" + std::to_string(goals.size()));
    if (c.ok) c.detail = "600 goals, success rate " + fmt(r.success_rate(), 3);
    return c;
  });

  criterion("fault_injection_calibration", 300.0, [] {
    const auto def = template_bot();
    const auto maps = approved_maps(*def);
    const auto profile = profile_from_json(read_json_file(kData + "/faults_ci_to_co.json"));
    const auto queries = intent_queries_for(*def, kCI);
    const auto goals = generate_goals(maps.at(kCI), generate_ontology(*def, 5), queries, 2000 / queries.size(), 5);
    SimConfig cfg;
    cfg.seed = 5;
    const auto r = run_session(make_mock_factory(def, profile), goals, maps, default_templates(), cfg);

    Check c;
    c.expect(goals.size() == 2000, std::to_string(goals.size()) + " goals");
    std::size_t misrouted = 0, routed_ci = 0;
    for (const auto& e : r.episodes) {
      misrouted += e.outcome == Outcome::IntentError && e.intent_predicted == kCO;
      // recount from the raw transcript: the dialog that answered the intent query
      const auto& reply = e.turns.at(1).bot_messages;
      routed_ci += !reply.empty() && reply.front().dialog == kCI;
    }
    const double n = static_cast<double>(r.episodes.size());
    const double rate = static_cast<double>(misrouted) / n;
    c.expect(rate >= 0.17 && rate <= 0.23, "misroute rate " + fmt(rate) + " outside [0.17, 0.23]");

    SessionMeta meta = meta_for(*def, "calibration", def->bot_name, "2024-01-01T00:00:00Z", 5, 200);
    const auto report = aggregate_metrics(r.episodes, meta);
    const double recall = report.metrics_for(kCI)->recall;
    c.expect(std::fabs(recall - (1.0 - rate)) <= 1e-9, "recall " + fmt(recall, 12) + " vs 1 - rate " + fmt(1 - rate, 12));
    c.expect(std::fabs(recall - static_cast<double>(routed_ci) / n) <= 1e-9,
             "recall " + fmt(recall, 12) + " vs recount " + fmt(routed_ci / n, 12));
    if (c.ok) c.detail = "2000 goals, misroute rate " + fmt(rate) + ", recall " + fmt(recall);
    return c;
  });

  criterion("bootstrap_interval", 20.0, [] {
    auto fixture = [](std::size_t scale, std::vector<std::string>& t, std::vector<std::string>& p) {
      t.clear();
      p.clear();
      for (std::size_t k = 0; k < scale; ++k)
        for (int i = 0; i < 100; ++i) {
          t.push_back("A");
          p.push_back(i < 80 ? "A" : "B");
          t.push_back("B");
          p.push_back(i < 80 ? "B" : "A");
        }
    };
    std::vector<std::string> t, p;
    fixture(1, t, p);
    Check c;
    c.expect(t.size() == 200, "fixture size");
    const auto a = bootstrap_f1_ci(t, p, kDefaultResamples, 0.05, 17);
    const auto b = bootstrap_f1_ci(t, p, kDefaultResamples, 0.05, 17);
    const auto ci = a.at("A");
    c.expect(std::fabs(ci.f1 - 0.80) <= 1e-12, "point estimate " + fmt(ci.f1, 6));
    c.expect(ci.lo <= 0.80 && 0.80 <= ci.hi, "interval [" + fmt(ci.lo) + ", " + fmt(ci.hi) + "] misses 0.80");
    c.expect(a == b, "two runs with the same seed differ");
    fixture(4, t, p);
    const auto big = bootstrap_f1_ci(t, p, kDefaultResamples, 0.05, 17).at("A");
    c.expect(big.hi - big.lo < ci.hi - ci.lo, "x4 width " + fmt(big.hi - big.lo) + " not below " + fmt(ci.hi - ci.lo));
    if (c.ok)
      c.detail = "F1 0.80, 95% interval [" + fmt(ci.lo) + ", " + fmt(ci.hi) + "], x4 width " + fmt(big.hi - big.lo);
    return c;
  });

  criterion("suggestion_rules", 5.0, [] {
    const std::string moved = "Can you give me the status of my order";
    const std::string ood = "any update on my support ticket?";
    std::vector<Episode> eps;
    Provenance prov;
    auto add = [&](const std::string& query, const std::string& original, Outcome o,
                   std::optional<std::string> predicted) {
      Episode e;
      e.goal_id = query;
      e.goal_name = kCI;
      e.intent_query = query;
      e.outcome = o;
      e.intent_predicted = std::move(predicted);
      prov[query] = original;
      eps.push_back(std::move(e));
    };
    for (int i = 0; i < 10; ++i) add("move paraphrase " + std::to_string(i), moved, Outcome::IntentError, kCO);
    std::vector<std::string> ood_members;
    for (int i = 0; i < 10; ++i) {
      const auto qy = "ood paraphrase " + std::to_string(i);
      if (i < 3) {
        add(qy, ood, Outcome::IntentError, std::nullopt);
        ood_members.push_back(qy);
      } else if (i == 3) {
        add(qy, ood, Outcome::IntentError, kCO);
      } else {
        add(qy, ood, Outcome::Success, std::nullopt);
      }
    }
    const auto s = suggest_remediations(group_intent_errors(eps, prov), paraphrase_totals(eps, prov));
    Check c;
    const RemediationSuggestion* move = nullptr;
    const RemediationSuggestion* augment = nullptr;
    for (const auto& x : s) {
      if (x.target_utterance == moved) move = &x;
      if (x.target_utterance == ood) augment = &x;
    }
    c.expect(s.size() == 2 && move && augment, std::to_string(s.size()) + " suggestions");
    if (!c.ok) return c;
    c.expect(move->kind == SuggestionKind::MoveIntent && move->proposed_intent == kCO,
             "100% misroute gave " + std::string(to_string(move->kind)));
    c.expect(augment->kind == SuggestionKind::AugmentTraining, "OOD group gave " + std::string(to_string(augment->kind)));
    c.expect(augment->queries == ood_members, "augmentation list differs from the OOD members");
    if (c.ok) c.detail = "MoveIntent -> " + kCO + "; AugmentTraining with " + std::to_string(ood_members.size()) + " queries";
    return c;
  });

  criterion("fuzz_oracle_and_filter_idempotence", 10.0, [] {
    std::mt19937_64 rng(99);
    const std::string alphabet = "abcdef ghij";
    auto text = [&] {
      std::string s(rng() % 41, ' ');
      for (auto& ch : s) ch = alphabet[rng() % alphabet.size()];
      return s;
    };
    Check c;
    for (int i = 0; i < 1000 && c.ok; ++i) {
      const auto a = text(), b = text();
      c.expect(fuzz_ratio(a, b) == oracle::fuzz(a, b), "pair " + std::to_string(i) + ": '" + a + "' / '" + b + "'");
    }
    std::uniform_real_distribution<double> u(0, 1);
    const FilterConfig cfg;
    for (int i = 0; i < 1000 && c.ok; ++i) {
      std::vector<ParaphraseCandidate> cands;
      for (std::size_t k = rng() % 15; k > 0; --k) {
        ParaphraseCandidate x;
        x.source = "s";
        x.text = "t" + std::to_string(k);
        x.sim = u(rng);
        x.fuzz = static_cast<int>(rng() % 101);
        x.scored = true;
        cands.push_back(x);
      }
      const auto once = filter_candidates(cands, cfg);
      c.expect(filter_candidates(once, cfg) == once, "set " + std::to_string(i) + " changed on refiltering");
    }
    if (c.ok) c.detail = "1000 pairs, 1000 candidate sets";
    return c;
  });

  criterion("path_enumeration", 30.0, [&] {
    std::mt19937_64 rng(424242);
    Check c;
    std::size_t pairs = 0, total = 0;
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
      const auto og = oracle::random_dag(rng, 10);
      ConversationGraph g;
      for (const auto& n : og.nodes) g.add_node(n);
      for (const auto& [s, l, d] : og.edges) g.add_edge(s, l, d);
      for (const auto& src : og.nodes)
        for (const auto& dst : og.nodes) {
          const auto a = enumerate_simple_paths(g, src, dst, og.nodes.size(), 1000000);
          const auto b = enumerate_simple_paths(g, src, dst, og.nodes.size(), 1000000);
          const auto want = oracle::dfs_count(og, src, dst);
          ++pairs;
          total += want;
          c.expect(!a.truncated && a.paths.size() == want,
                   "dag " + std::to_string(trial) + " " + src + "->" + dst + ": " + std::to_string(a.paths.size()) +
                       " vs " + std::to_string(want));
          c.expect(export_paths_jsonl(a) == export_paths_jsonl(b), "repeated enumeration differs");
        }
    }
    // byte-for-byte across processes
    const auto dir = work / "paths";
    fs::create_directories(dir);
    for (const auto* name : {"a.jsonl", "b.jsonl"})
      c.expect(sh(q(cli) + " paths --bot " + q(kData + "/template_bot.json") + " --src Report_an_Issue --dst End_Chat --out " +
                  q((dir / name).string())) == 0,
               "paths subcommand failed");
    if (c.ok) c.expect(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"), "CLI path export differs between runs");
    if (c.ok) c.detail = "100 DAGs, " + std::to_string(pairs) + " node pairs, " + std::to_string(total) + " paths";
    return c;
  });

  criterion("full_pipeline_determinism", 120.0, [&] {
    Check c;
    auto run = [&](const fs::path& dir) {
      fs::create_directories(dir);
      const auto bot = q(kData + "/template_bot.json");
      const auto d = [&](const std::string& f) { return q((dir / f).string()); };
      const std::vector<std::string> steps = {
          " parse --bot " + bot + " --out " + d("parsed") + " --approve-all",
          " goals --bot " + bot + " --maps " + d("parsed") + " --out " + d("goals.json") + " --seed 7 --per-query 5",
          " simulate --bot " + bot + " --maps " + d("parsed") + " --goals " + d("goals.json") + " --out " +
              d("transcripts.jsonl") + " --seed 7 --faults " + q(kData + "/faults_ci_to_co.json"),
          " report --bot " + bot + " --transcripts " + d("transcripts.jsonl") + " --out " + d("report.json") +
              " --seed 7 --generated-at 2024-01-01T00:00:00Z"};
      for (const auto& s : steps) {
        const int code = sh(q(cli) + s + " > /dev/null");
        c.expect(code == 0, "step failed (exit " + std::to_string(code) + "):" + s);
      }
    };
    run(work / "run1");
    run(work / "run2");
    if (!c.ok) return c;
    for (const auto* f : {"goals.json", "transcripts.jsonl", "report.json"})
      c.expect(read_file(work / "run1" / f) == read_file(work / "run2" / f), std::string(f) + " differs between runs");
    if (c.ok) {
      const auto eps = episodes_from_jsonl(work / "run1" / "transcripts.jsonl");
      c.detail = std::to_string(eps.size()) + " episodes; transcripts and report byte-identical";
    }
    return c;
  });

  fs::remove_all(work);
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failures ? 1 : 0;
}
