// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "propaganda/cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "propaganda/classifiers.h"
#include "propaganda/corpus.h"
#include "propaganda/embeddings.h"
#include "propaganda/error.h"
#include "propaganda/eval.h"
#include "propaganda/features.h"
#include "propaganda/hybrid.h"
#include "propaganda/segmentation.h"
#include "propaganda/span_heads.h"

namespace propaganda::cli {
namespace {

namespace fs = std::filesystem;

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  T v{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw FormatError("config: bad value '" + value + "' for " + key);
  }
  return v;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// Flags that can override config values.
struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> si_weight;
  std::optional<std::string> alphas;
  std::optional<std::size_t> max_iters;
  std::optional<std::size_t> dim;

  RunConfig resolve() const {
    RunConfig rc;
    if (config) rc.load(*config);
    if (seed) rc.seed = *seed;
    if (si_weight) rc.si_weight = *si_weight;
    if (alphas) rc.alphas = parse_alphas(*alphas);
    if (max_iters) rc.max_iters = *max_iters;
    if (dim) rc.fake_dim = *dim;
    return rc;
  }
};

void add_common(CLI::App* app, CommonFlags& f, bool with_si = false) {
  app->add_option("--config", f.config, "key=value hyperparameter file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--max-iters", f.max_iters, "maximum optimizer iterations");
  if (with_si) {
    app->add_option("--si-weight", f.si_weight, "minority weight w inside the boundary loss");
    app->add_option("--alphas", f.alphas, "loss weights alpha_sent,alpha_start,alpha_end");
  }
}

struct IoStreams {
  std::ostream& out;
  std::ostream& err;
};

void warn(std::ostream& err, const std::string& msg) { err << "propdet: warning: " << msg << '\n'; }

// Token alignment for a context: the sidecar if one was given, else the
// built-in tokenizer.
TokenAlignment alignment_for(const Context& c, const ArticleIndex& articles,
                             const std::map<std::string, TokenAlignment>* sidecar) {
  if (sidecar != nullptr) {
    auto it = sidecar->find(c.context_id);
    if (it == sidecar->end()) {
      throw FormatError("alignment sidecar has no entry for context " + c.context_id);
    }
    return it->second;
  }
  return tokenize_and_align(c, find_article(articles, c.article_id));
}

// Pairs each context with its embedding and alignment, truncated to
// max_seq_len tokens.
struct AlignedContext {
  const Context* context;
  TokenAlignment alignment;
  EmbeddingSequence embedding;
};

std::vector<AlignedContext> align_contexts(const std::vector<Context>& contexts,
                                           const ArticleIndex& articles,
                                           const EmbeddingMap& embeddings,
                                           const std::map<std::string, TokenAlignment>* sidecar,
                                           std::size_t max_seq_len, std::ostream& err) {
  std::vector<AlignedContext> out;
  std::size_t truncated = 0;
  for (const Context& c : contexts) {
    auto it = embeddings.find(c.context_id);
    if (it == embeddings.end()) {
      throw FormatError("no embedding for context " + c.context_id);
    }
    TokenAlignment alignment = alignment_for(c, articles, sidecar);
    if (alignment.token_spans.size() != it->second.num_tokens()) {
      throw FormatError("context " + c.context_id + ": " +
                        std::to_string(alignment.token_spans.size()) + " tokens but " +
                        std::to_string(it->second.num_tokens()) + " embedding rows");
    }
    if (alignment.token_spans.empty()) continue;
    EmbeddingSequence emb = it->second;
    if (alignment.token_spans.size() > max_seq_len) {
      ++truncated;
      alignment.token_spans.resize(max_seq_len);
      emb = emb.truncated(max_seq_len);
    }
    out.push_back({&c, std::move(alignment), std::move(emb)});
  }
  if (truncated > 0) {
    warn(err, std::to_string(truncated) + " context(s) truncated to " +
                  std::to_string(max_seq_len) + " tokens");
  }
  return out;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string articles;
  std::optional<std::string> si_labels;
  std::optional<std::string> tc_labels;
  std::optional<std::string> out;
};

int do_ingest(const IngestArgs& a, IoStreams& io) {
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  nlohmann::ordered_json summary;
  summary["articles"] = articles.size();
  std::size_t chars = 0;
  for (const Article& art : articles) chars += art.text.size();
  summary["characters"] = chars;
  if (a.si_labels) {
    const auto spans = load_si_labels(*a.si_labels, &index);
    summary["si_spans"] = spans.size();
  }
  if (a.tc_labels) {
    const auto frags = load_tc_labels(*a.tc_labels, index);
    summary["tc_fragments"] = frags.size();
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    std::array<std::size_t, kNumTechniques> c{};
    for (const auto& f : frags) ++c[index_of(f.technique)];
    for (std::size_t i = 0; i < kNumTechniques; ++i) {
      counts[std::string(kTechniqueLabels[i])] = c[i];
    }
    summary["technique_counts"] = counts;
  }
  const std::string text = summary.dump(2) + "\n";
  if (a.out) open_output(*a.out) << text;
  else io.out << text;
  return 0;
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
  std::string articles;
  std::optional<std::string> si_labels;
  std::string strategy = "sentential";
  std::string out;
};

int do_segment(const SegmentArgs& a, IoStreams& io) {
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  std::vector<SpanAnnotation> spans;
  if (a.si_labels) spans = load_si_labels(*a.si_labels, &index);
  const ContextStrategy strategy = parse_strategy(a.strategy);
  SegmentStats stats;
  std::vector<Context> contexts;
  for (const Article& art : articles) {
    auto cs = segment_article(art, spans, strategy, &stats);
    contexts.insert(contexts.end(), cs.begin(), cs.end());
  }
  auto out = open_output(a.out);
  write_contexts(out, contexts);
  io.err << "propdet: " << contexts.size() << " " << strategy_name(strategy)
         << " contexts; gold pieces " << stats.gold_pieces << ", retained " << stats.retained
         << "\n";
  if (stats.outside_text > 0) {
    warn(io.err, std::to_string(stats.outside_text) + " span(s) cover only inter-sentence space");
  }
  return 0;
}

// ---------------------------------------------------------------- embed-fake

struct EmbedArgs {
  std::string articles;
  std::optional<std::string> contexts;
  std::optional<std::string> fragments;
  std::string out;
  std::optional<std::string> alignment_out;
  CommonFlags common;
};

int do_embed_fake(const EmbedArgs& a, IoStreams& io) {
  const RunConfig rc = a.common.resolve();
  if (a.contexts.has_value() == a.fragments.has_value()) {
    throw Error("embed-fake needs exactly one of --contexts or --fragments");
  }
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  const FakeEncoder encoder(rc.fake_dim, rc.seed);
  std::vector<EmbeddingSequence> seqs;
  std::vector<TokenAlignment> alignments;
  std::size_t truncated = 0;
  const auto encode = [&](const std::string& id, const Article& art, std::size_t start,
                          std::size_t end) {
    const auto view = std::u32string_view(art.text).substr(start, end - start);
    std::vector<CharRange> tokens = tokenize(view);
    if (tokens.size() > rc.max_seq_len) {
      ++truncated;
      tokens.resize(rc.max_seq_len);
    }
    seqs.push_back(encoder.encode(id, view, tokens));
    alignments.push_back({id, std::move(tokens)});
  };
  if (a.contexts) {
    for (const Context& c : load_contexts(*a.contexts)) {
      encode(c.context_id, find_article(index, c.article_id), c.start, c.end);
    }
  } else {
    for (const Fragment& f : load_fragments(*a.fragments, index)) {
      encode(f.id(), find_article(index, f.article_id), f.start, f.end);
    }
  }
  if (truncated > 0) {
    warn(io.err, std::to_string(truncated) + " sequence(s) truncated to " +
                     std::to_string(rc.max_seq_len) + " tokens");
  }
  auto out = open_output(a.out);
  write_embeddings(out, rc.fake_dim, seqs);
  if (a.alignment_out) {
    auto aout = open_output(*a.alignment_out);
    write_alignments(aout, alignments);
  }
  return 0;
}

// ---------------------------------------------------------------- SI

struct TrainSiArgs {
  std::string articles;
  std::string contexts;
  std::string embeddings;
  std::optional<std::string> alignment;
  std::string variant = "deep_sep";
  std::string model;
  std::optional<std::string> log;
  CommonFlags common;
};

int do_train_si(const TrainSiArgs& a, IoStreams& io) {
  const RunConfig rc = a.common.resolve();
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  const auto contexts = load_contexts(a.contexts);
  const auto embeddings = load_embeddings(a.embeddings);
  std::optional<std::map<std::string, TokenAlignment>> sidecar;
  if (a.alignment) sidecar = load_alignments(*a.alignment);
  const auto aligned = align_contexts(contexts, index, embeddings,
                                      sidecar ? &*sidecar : nullptr, rc.max_seq_len, io.err);
  if (aligned.empty()) throw Error("train-si: no usable contexts");

  std::vector<HeadExample> data;
  std::size_t with_span = 0;
  for (const AlignedContext& ac : aligned) {
    HeadExample ex{ac.embedding, target_for_context(*ac.context, ac.alignment)};
    if (ex.target.has_span) ++with_span;
    data.push_back(std::move(ex));
  }
  HeadConfig hc;
  hc.variant = parse_variant(a.variant);
  hc.embed_dim = data.front().embedding.dim();
  hc.deep_dim = rc.deep_dim;
  hc.sent_dim = rc.sent_dim;
  hc.si_weight = rc.si_weight;
  hc.alphas = rc.alphas;
  hc.seed = rc.seed;
  HeadTrainConfig tc;
  tc.learning_rate = rc.learning_rate;
  tc.max_iters = rc.max_iters;
  tc.tolerance = rc.tolerance;
  HeadTrainResult result;
  const SpanHeadModel model = train_heads(data, hc, tc, &result);

  Checkpoint ckpt = model.to_checkpoint();
  ckpt.set_meta("max_seq_len", std::to_string(rc.max_seq_len));
  save_checkpoint(a.model, ckpt);
  if (a.log) {
    auto log = open_output(*a.log);
    result.trace.write_csv(log);
  }
  io.err << "propdet: trained " << variant_name(hc.variant) << " heads on " << data.size()
         << " contexts (" << with_span << " with a span); loss "
         << format_double(result.trace.loss.front()) << " -> "
         << format_double(result.trace.loss.back()) << " in " << result.trace.iterations()
         << " iterations\n";
  return 0;
}

struct PredictSiArgs {
  std::string articles;
  std::string contexts;
  std::string embeddings;
  std::optional<std::string> alignment;
  std::string model;
  std::string out;
};

int do_predict_si(const PredictSiArgs& a, IoStreams& io) {
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  const Checkpoint ckpt = load_checkpoint(a.model);
  const SpanHeadModel model = SpanHeadModel::from_checkpoint(ckpt);
  const std::size_t max_seq_len = ckpt.meta_size("max_seq_len");
  const auto contexts = load_contexts(a.contexts);
  const auto embeddings = load_embeddings(a.embeddings);
  std::optional<std::map<std::string, TokenAlignment>> sidecar;
  if (a.alignment) sidecar = load_alignments(*a.alignment);
  const auto aligned = align_contexts(contexts, index, embeddings,
                                      sidecar ? &*sidecar : nullptr, max_seq_len, io.err);
  std::vector<SpanAnnotation> spans;
  for (const AlignedContext& ac : aligned) {
    const DecodedSpans decoded = decode_span(model.forward(ac.embedding));
    for (const TokenSpan& ts : decoded.spans) {
      spans.push_back(token_span_to_char(ac.alignment, ts, *ac.context));
    }
  }
  const auto merged = union_si_predictions({spans});
  auto out = open_output(a.out);
  write_si_labels(out, merged);
  io.err << "propdet: " << merged.size() << " predicted spans over " << aligned.size()
         << " contexts\n";
  return 0;
}

struct UnionSiArgs {
  std::vector<std::string> preds;
  std::string out;
};

int do_union_si(const UnionSiArgs& a, IoStreams&) {
  std::vector<std::vector<SpanAnnotation>> sets;
  for (const std::string& p : a.preds) sets.push_back(load_si_labels(p));
  auto out = open_output(a.out);
  write_si_labels(out, union_si_predictions(sets));
  return 0;
}

struct ScoreArgs {
  std::optional<std::string> articles;
  std::string gold;
  std::string pred;
  bool json = false;
};

int do_score_si(const ScoreArgs& a, IoStreams& io) {
  std::optional<ArticleIndex> index;
  if (a.articles) index = index_articles(load_articles(*a.articles));
  const auto gold = load_si_labels(a.gold, index ? &*index : nullptr);
  const auto pred = load_si_labels(a.pred, index ? &*index : nullptr);
  const SpanScore score = score_si(gold, pred);
  io.out << (a.json ? format_si_jsonl(score) : format_si_report(score));
  return 0;
}

// ---------------------------------------------------------------- TC

struct TrainTcArgs {
  std::string articles;
  std::string tc_labels;
  std::optional<std::string> embeddings;
  std::optional<std::string> lexicon;
  std::optional<std::string> wordlists;
  std::optional<std::string> loss;
  std::string model_dir;
  std::optional<std::string> feature_dump;
  CommonFlags common;
};

TrainConfig train_config_from(const RunConfig& rc) {
  TrainConfig tc;
  tc.learning_rate = rc.learning_rate;
  tc.max_iters = rc.max_iters;
  tc.l2_C = rc.l2_C;
  tc.tolerance = rc.tolerance;
  tc.seed = rc.seed;
  return tc;
}

std::vector<long> technique_counts(const std::vector<TechniqueLabeledFragment>& frags) {
  std::vector<long> counts(kNumTechniques, 0);
  for (const auto& f : frags) ++counts[index_of(f.technique)];
  return counts;
}

void save_text(const fs::path& path, const std::string& text) { open_output(path) << text; }

int do_train_tc(const TrainTcArgs& a, IoStreams& io) {
  const RunConfig rc = a.common.resolve();
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  const auto frags = load_tc_labels(a.tc_labels, index);
  if (frags.empty()) throw Error("train-tc: no labelled fragments");
  const EmotionLexicon lexicon = a.lexicon ? load_emotion_lexicon(*a.lexicon) : EmotionLexicon();
  const WordLists lists = a.wordlists ? load_word_lists(*a.wordlists) : WordLists::defaults();
  const std::vector<long> counts = technique_counts(frags);
  fs::create_directories(a.model_dir);
  const fs::path dir(a.model_dir);

  // LR over hand-crafted features, balanced class weights.
  std::vector<std::string> texts;
  for (const auto& f : frags) texts.push_back(f.fragment.text);
  const TfidfModel tfidf = TfidfModel::fit(texts);
  std::vector<Example> lr_data;
  std::vector<FeatureVector> fvs;
  std::vector<Fragment> plain_frags;
  for (const auto& f : frags) {
    FeatureVector fv = build_feature_vector(f.fragment, find_article(index, f.fragment.article_id),
                                            tfidf, lexicon, lists);
    lr_data.push_back({to_dense(fv, tfidf.vocabulary_size()), index_of(f.technique)});
    fvs.push_back(std::move(fv));
    plain_frags.push_back(f.fragment);
  }
  const Standardizer standardizer = Standardizer::fit(lr_data, {0});
  for (Example& ex : lr_data) standardizer.apply(ex.input);
  TrainConfig lr_cfg = train_config_from(rc);
  lr_cfg.loss_mode = LossMode::kCostWeighted;
  lr_cfg.class_weights = balanced_class_weights(counts);
  DescentTrace lr_trace;
  const LinearClassifier lr = train(lr_data, kNumTechniques, lr_cfg, &lr_trace);
  Checkpoint lr_ckpt = lr.to_checkpoint("tc_lr");
  lr_ckpt.set_meta("class_weighting", "balanced");
  lr_ckpt.set_meta("tfidf", "smoothed_idf_l2_norm");
  standardizer.add_to(lr_ckpt);
  save_checkpoint(dir / "lr.ckpt", lr_ckpt);
  {
    std::ostringstream s;
    tfidf.save(s);
    save_text(dir / "tfidf.txt", s.str());
    std::ostringstream w;
    write_word_lists(w, lists);
    save_text(dir / "wordlists.txt", w.str());
    std::ostringstream l;
    write_emotion_lexicon(l, lexicon);
    save_text(dir / "lexicon.tsv", l.str());
    std::ostringstream t;
    lr_trace.write_csv(t);
    save_text(dir / "train_lr.csv", t.str());
  }
  if (a.feature_dump) {
    auto dump = open_output(*a.feature_dump);
    write_feature_dump(dump, plain_frags, fvs, lexicon);
  }
  io.err << "propdet: lr trained on " << lr_data.size() << " fragments, "
         << tfidf.vocabulary_size() << " TF-IDF columns\n";

  // Pooled-embedding softmax classifiers.
  std::vector<LossMode> modes;
  if (a.loss) modes.push_back(parse_loss_mode(*a.loss));
  else modes = {LossMode::kPlain, LossMode::kCostWeighted};
  if (!a.embeddings) {
    throw Error("train-tc: --embeddings is required for the pooled classifiers");
  }
  const EmbeddingMap embeddings = load_embeddings(*a.embeddings);
  std::vector<Example> pooled;
  for (const auto& f : frags) {
    auto it = embeddings.find(f.fragment.id());
    if (it == embeddings.end()) throw FormatError("no embedding for fragment " + f.fragment.id());
    pooled.push_back({pool_embedding(it->second), index_of(f.technique)});
  }
  for (LossMode mode : modes) {
    TrainConfig cfg = train_config_from(rc);
    cfg.l2_C = std::numeric_limits<double>::infinity();
    cfg.loss_mode = mode;
    if (mode == LossMode::kCostWeighted) cfg.class_weights = compute_class_weights(counts);
    DescentTrace trace;
    const LinearClassifier clf = train(pooled, kNumTechniques, cfg, &trace);
    const std::string name = mode == LossMode::kPlain ? "base" : "cost_weighted";
    Checkpoint ckpt = clf.to_checkpoint("tc_pooled");
    ckpt.set_meta("loss", std::string(loss_mode_name(mode)));
    save_checkpoint(dir / (name + ".ckpt"), ckpt);
    std::ostringstream t;
    trace.write_csv(t);
    save_text(dir / ("train_" + name + ".csv"), t.str());
    io.err << "propdet: " << name << " trained; loss " << format_double(trace.loss.front())
           << " -> " << format_double(trace.loss.back()) << "\n";
  }
  return 0;
}

struct PredictTcArgs {
  std::string articles;
  std::string fragments;
  std::optional<std::string> embeddings;
  std::string model_dir;
  std::string route = "default";
  std::optional<std::string> pos_sidecar;
  bool no_correct = false;
  std::string out;
};

int do_predict_tc(const PredictTcArgs& a, IoStreams& io) {
  const auto articles = load_articles(a.articles);
  const ArticleIndex index = index_articles(articles);
  const auto frags = load_fragments(a.fragments, index);
  const fs::path dir(a.model_dir);

  std::optional<Submodel> single;
  RoutingTable table = RoutingTable::defaults();
  if (a.route == "base" || a.route == "cost_weighted" || a.route == "lr") {
    single = parse_submodel(a.route);
  } else if (a.route != "default") {
    table = load_routing_table(a.route);
  }
  const auto needed = [&](Submodel s) { return !single || *single == s; };

  std::vector<Technique> lr_pred, base_pred, cost_pred;
  if (needed(Submodel::kLr)) {
    const Checkpoint ckpt = load_checkpoint(dir / "lr.ckpt");
    const LinearClassifier lr = LinearClassifier::from_checkpoint(ckpt);
    const Standardizer standardizer = Standardizer::from_checkpoint(ckpt);
    std::ifstream tin(dir / "tfidf.txt");
    if (!tin) throw Error("missing " + (dir / "tfidf.txt").string());
    const TfidfModel tfidf = TfidfModel::load(tin);
    const WordLists lists = load_word_lists(dir / "wordlists.txt");
    const EmotionLexicon lexicon = load_emotion_lexicon(dir / "lexicon.tsv");
    for (const Fragment& f : frags) {
      std::vector<double> x = to_dense(
          build_feature_vector(f, find_article(index, f.article_id), tfidf, lexicon, lists),
          tfidf.vocabulary_size());
      standardizer.apply(x);
      lr_pred.push_back(technique_at(lr.predict(x).label));
    }
  }
  std::optional<EmbeddingMap> embeddings;
  const auto pooled_predict = [&](const std::string& name, std::vector<Technique>& preds) {
    if (!a.embeddings) throw Error("predict-tc: --embeddings required for the " + name + " model");
    if (!embeddings) embeddings = load_embeddings(*a.embeddings);
    const LinearClassifier clf =
        LinearClassifier::from_checkpoint(load_checkpoint(dir / (name + ".ckpt")));
    for (const Fragment& f : frags) {
      auto it = embeddings->find(f.id());
      if (it == embeddings->end()) throw FormatError("no embedding for fragment " + f.id());
      preds.push_back(technique_at(clf.predict(pool_embedding(it->second)).label));
    }
  };
  // A model dir trained with a single --loss holds only one pooled model;
  // it then stands in for the other.
  const auto pooled_name = [&](const std::string& want, const std::string& other) {
    if (fs::exists(dir / (want + ".ckpt")) || !fs::exists(dir / (other + ".ckpt"))) return want;
    warn(io.err, want + ".ckpt missing, using " + other + ".ckpt in its place");
    return other;
  };
  if (needed(Submodel::kBase)) pooled_predict(pooled_name("base", "cost_weighted"), base_pred);
  if (needed(Submodel::kCostWeighted)) {
    pooled_predict(pooled_name("cost_weighted", "base"), cost_pred);
  }

  std::vector<Technique> final_pred;
  if (!single) final_pred = route({base_pred, cost_pred, lr_pred}, table);
  else if (*single == Submodel::kLr) final_pred = lr_pred;
  else if (*single == Submodel::kBase) final_pred = base_pred;
  else final_pred = cost_pred;

  std::size_t corrected = 0;
  if (!a.no_correct) {
    PosTagger tagger;
    if (a.pos_sidecar) tagger = PosTagger(load_pos_sidecar(*a.pos_sidecar));
    for (std::size_t i = 0; i < frags.size(); ++i) {
      const Article& art = find_article(index, frags[i].article_id);
      const Technique fixed =
          correct(frags[i].text, final_pred[i], art.utf8(), tagger.tag(frags[i]));
      if (fixed != final_pred[i]) ++corrected;
      final_pred[i] = fixed;
    }
  }
  std::vector<TechniqueLabeledFragment> out_frags;
  for (std::size_t i = 0; i < frags.size(); ++i) out_frags.push_back({frags[i], final_pred[i]});
  auto out = open_output(a.out);
  write_tc_labels(out, out_frags);
  io.err << "propdet: " << frags.size() << " fragments classified (route " << a.route << ", "
         << corrected << " rule corrections)\n";
  return 0;
}

int do_score_tc(const ScoreArgs& a, IoStreams& io) {
  if (!a.articles) throw Error("score-tc requires --articles");
  const ArticleIndex index = index_articles(load_articles(*a.articles));
  const auto gold = load_tc_labels(a.gold, index);
  const auto pred = load_tc_labels(a.pred, index);
  const TcScore score = score_tc(gold, pred);
  io.out << (a.json ? format_tc_jsonl(score) : format_tc_report(score));
  return 0;
}

}  // namespace

std::array<double, 3> parse_alphas(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw FormatError("--alphas expects three comma-separated numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = parse_value<double>("alphas", std::string(trim(parts[i])));
  return out;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
  if (key == "max_seq_len") max_seq_len = parse_value<std::size_t>(key, value);
  else if (key == "learning_rate") learning_rate = parse_value<double>(key, value);
  else if (key == "batch_size") batch_size = parse_value<std::size_t>(key, value);
  else if (key == "max_iters") max_iters = parse_value<std::size_t>(key, value);
  else if (key == "tolerance") tolerance = parse_value<double>(key, value);
  else if (key == "l2_C") l2_C = parse_value<double>(key, value);
  else if (key == "deep_dim") deep_dim = parse_value<std::size_t>(key, value);
  else if (key == "sent_dim") sent_dim = parse_value<std::size_t>(key, value);
  else if (key == "si_weight") si_weight = parse_value<double>(key, value);
  else if (key == "alphas") alphas = parse_alphas(value);
  else if (key == "seed") seed = parse_value<std::uint64_t>(key, value);
  else if (key == "fake_dim") fake_dim = parse_value<std::size_t>(key, value);
  else throw FormatError("config: unknown key '" + key + "'");
}

void RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    apply(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
  if (max_seq_len == 0) throw FormatError("config: max_seq_len must be positive");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Propaganda span identification and technique classification toolkit", "propdet"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "validate articles and label files, print a summary");
  c_ingest->add_option("--articles", ingest.articles, "directory of article{id}.txt")->required();
  c_ingest->add_option("--si-labels", ingest.si_labels, "SI gold TSV");
  c_ingest->add_option("--tc-labels", ingest.tc_labels, "TC gold TSV");
  c_ingest->add_option("--out", ingest.out, "write the JSON summary here");

  SegmentArgs segment;
  auto* c_segment = app.add_subcommand("segment", "build mini or sentential contexts");
  c_segment->add_option("--articles", segment.articles)->required();
  c_segment->add_option("--si-labels", segment.si_labels, "gold spans (omit for inference)");
  c_segment->add_option("--strategy", segment.strategy)
      ->check(CLI::IsMember({"mini", "sentential"}));
  c_segment->add_option("--out", segment.out, "contexts TSV")->required();

  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed-fake", "write deterministic hash-based embeddings");
  c_embed->add_option("--articles", embed.articles)->required();
  c_embed->add_option("--contexts", embed.contexts, "contexts TSV");
  c_embed->add_option("--fragments", embed.fragments, "TC fragments TSV");
  c_embed->add_option("--out", embed.out, "PDEMB1 output")->required();
  c_embed->add_option("--alignment-out", embed.alignment_out, "token alignment sidecar");
  c_embed->add_option("--dim", embed.common.dim, "embedding dimension");
  add_common(c_embed, embed.common);

  TrainSiArgs train_si;
  auto* c_train_si = app.add_subcommand("train-si", "train the span identification heads");
  c_train_si->add_option("--articles", train_si.articles)->required();
  c_train_si->add_option("--contexts", train_si.contexts)->required();
  c_train_si->add_option("--embeddings", train_si.embeddings)->required();
  c_train_si->add_option("--alignment", train_si.alignment, "token alignment sidecar");
  c_train_si->add_option("--variant", train_si.variant)
      ->check(CLI::IsMember({"base", "sent", "deep_sep", "deep_combine"}));
  c_train_si->add_option("--model", train_si.model, "checkpoint output")->required();
  c_train_si->add_option("--log", train_si.log, "training log CSV");
  add_common(c_train_si, train_si.common, true);

  PredictSiArgs predict_si;
  auto* c_predict_si = app.add_subcommand("predict-si", "predict propaganda spans");
  c_predict_si->add_option("--articles", predict_si.articles)->required();
  c_predict_si->add_option("--contexts", predict_si.contexts)->required();
  c_predict_si->add_option("--embeddings", predict_si.embeddings)->required();
  c_predict_si->add_option("--alignment", predict_si.alignment);
  c_predict_si->add_option("--model", predict_si.model)->required();
  c_predict_si->add_option("--out", predict_si.out)->required();

  UnionSiArgs union_si;
  auto* c_union = app.add_subcommand("union-si", "union several SI prediction files");
  c_union->add_option("--pred", union_si.preds, "prediction TSV (repeatable)")->required();
  c_union->add_option("--out", union_si.out)->required();

  ScoreArgs score_si_args;
  auto* c_score_si = app.add_subcommand("score-si", "partial-match span scoring");
  c_score_si->add_option("--articles", score_si_args.articles, "validate bounds against articles");
  c_score_si->add_option("--gold", score_si_args.gold)->required();
  c_score_si->add_option("--pred", score_si_args.pred)->required();
  c_score_si->add_flag("--json", score_si_args.json, "JSON-lines output");

  TrainTcArgs train_tc;
  auto* c_train_tc = app.add_subcommand("train-tc", "train the technique classification submodels");
  c_train_tc->add_option("--articles", train_tc.articles)->required();
  c_train_tc->add_option("--tc-labels", train_tc.tc_labels)->required();
  c_train_tc->add_option("--embeddings", train_tc.embeddings, "fragment embeddings");
  c_train_tc->add_option("--lexicon", train_tc.lexicon, "emotion lexicon TSV");
  c_train_tc->add_option("--wordlists", train_tc.wordlists, "feature word lists");
  c_train_tc->add_option("--loss", train_tc.loss, "pooled model loss (default: both)")
      ->check(CLI::IsMember({"plain", "cost_weighted"}));
  c_train_tc->add_option("--model-dir", train_tc.model_dir)->required();
  c_train_tc->add_option("--feature-dump", train_tc.feature_dump, "feature TSV for debugging");
  add_common(c_train_tc, train_tc.common);

  PredictTcArgs predict_tc;
  auto* c_predict_tc = app.add_subcommand("predict-tc", "classify fragments with the hybrid model");
  c_predict_tc->add_option("--articles", predict_tc.articles)->required();
  c_predict_tc->add_option("--fragments", predict_tc.fragments)->required();
  c_predict_tc->add_option("--embeddings", predict_tc.embeddings);
  c_predict_tc->add_option("--model-dir", predict_tc.model_dir)->required();
  c_predict_tc->add_option("--route", predict_tc.route,
                           "default, base, cost_weighted, lr, or a routing file");
  c_predict_tc->add_option("--pos-sidecar", predict_tc.pos_sidecar);
  c_predict_tc->add_flag("--no-correct", predict_tc.no_correct, "skip POS rule correction");
  c_predict_tc->add_option("--out", predict_tc.out)->required();

  ScoreArgs score_tc_args;
  auto* c_score_tc = app.add_subcommand("score-tc", "micro-F1 technique scoring");
  c_score_tc->add_option("--articles", score_tc_args.articles)->required();
  c_score_tc->add_option("--gold", score_tc_args.gold)->required();
  c_score_tc->add_option("--pred", score_tc_args.pred)->required();
  c_score_tc->add_flag("--json", score_tc_args.json);

  std::vector<std::string> argv_storage = {"propdet"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  IoStreams io{out, err};
  try {
    if (*c_ingest) return do_ingest(ingest, io);
    if (*c_segment) return do_segment(segment, io);
    if (*c_embed) return do_embed_fake(embed, io);
    if (*c_train_si) return do_train_si(train_si, io);
    if (*c_predict_si) return do_predict_si(predict_si, io);
    if (*c_union) return do_union_si(union_si, io);
    if (*c_score_si) return do_score_si(score_si_args, io);
    if (*c_train_tc) return do_train_tc(train_tc, io);
    if (*c_predict_tc) return do_predict_tc(predict_tc, io);
    if (*c_score_tc) return do_score_tc(score_tc_args, io);
  } catch (const std::exception& e) {
    err << "propdet: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace propaganda::cli
