#include "qtwalk/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "qtwalk/errors.hpp"
#include "qtwalk/format.hpp"
#include "qtwalk/kgrc_converter.hpp"
#include "qtwalk/rng.hpp"
#include "qtwalk/turtle_star.hpp"

namespace qtwalk {

namespace {

struct SceneKind {
  std::string_view type;
  std::vector<std::string_view> predicates;
  bool quotes_scenes;
};

const std::vector<SceneKind>& scene_kinds() {
  static const std::vector<SceneKind> kinds = {
      {"Situation", {"meet", "see", "take", "go", "find"}, false},
      {"Talk", {"say", "tell", "ask"}, true},
      {"Thought", {"think", "believe", "suspect"}, true},
      {"Statement", {"claim", "deny", "report"}, true},
  };
  return kinds;
}

struct Scene {
  std::size_t kind = 0;
  std::string predicate;
  std::optional<Term> subject;
  std::optional<std::string> object_role;
  std::optional<Term> object;
  std::optional<std::size_t> quoted_scene;
  std::optional<Term> where;
  std::optional<Term> when;
  int depth = 1;
};

}  // namespace

Fixture generate_fixture(const FixtureOptions& o) {
  if (o.persons < 4 || o.objects < 3 || o.places < 2 || o.scenes == 0 ||
      o.story_length == 0) {
    throw InputError("fixture too small");
  }
  Rng rng(o.seed);
  const std::string ns(kFixtureNamespace);
  const Term rdf_type = Term::iri(std::string(kRdfType));
  auto entity = [&](std::string_view kind, std::size_t i) {
    return Term::iri(ns + std::string(kind) + "_" + std::to_string(i));
  };
  auto cls = [&](std::string_view name) {
    return Term::iri(ns + "ontology#" + std::string(name));
  };
  auto prop = [&](std::string_view name) {
    return Term::iri(ns + "ontology#" + std::string(name));
  };

  std::vector<Term> persons, objects, places;
  for (std::size_t i = 0; i < o.persons; ++i) persons.push_back(entity("person", i));
  for (std::size_t i = 0; i < o.objects; ++i) objects.push_back(entity("object", i));
  for (std::size_t i = 0; i < o.places; ++i) places.push_back(entity("place", i));

  Fixture fx;
  auto& out = fx.reified;
  for (const auto& p : persons) out.push_back({p, rdf_type, cls("Person")});
  for (const auto& x : objects) out.push_back({x, rdf_type, cls("Object")});
  for (const auto& x : places) out.push_back({x, rdf_type, cls("Place")});
  for (const auto& p : persons) {
    out.push_back({p, prop("livesIn"), places[rng.index(places.size())]});
    out.push_back({p, prop("knows"), persons[rng.index(persons.size())]});
  }
  for (const auto& x : objects) {
    out.push_back({x, prop("locatedIn"), places[rng.index(places.size())]});
  }

  auto pick = [&](const std::vector<Term>& from) { return from[rng.index(from.size())]; };

  std::vector<Scene> scenes;
  std::vector<Term> cast_persons, cast_objects, cast_places;
  for (std::size_t i = 0; i < o.scenes; ++i) {
    if (i % o.story_length == 0) {
      cast_persons = {pick(persons), pick(persons), pick(persons), pick(persons)};
      cast_objects = {pick(objects), pick(objects), pick(objects)};
      cast_places = {pick(places), pick(places)};
    }
    Scene sc;
    const bool duplicate = i > 0 && rng.uniform() < o.duplicate_rate;
    if (duplicate) {
      std::vector<std::size_t> flat;
      for (std::size_t j = 0; j < i; ++j) {
        if (!scenes[j].quoted_scene) flat.push_back(j);
      }
      if (!flat.empty()) {
        const Scene& src = scenes[flat[rng.index(flat.size())]];
        sc.kind = src.kind;
        sc.predicate = src.predicate;
        sc.subject = src.subject;
        sc.object_role = src.object_role;
        sc.object = src.object;
      }
    }
    if (sc.predicate.empty()) {
      sc.kind = rng.index(scene_kinds().size());
      const auto& kind = scene_kinds()[sc.kind];
      sc.predicate = ns + "pred/" +
                     std::string(kind.predicates[rng.index(kind.predicates.size())]);
      if (rng.uniform() >= o.missing_role_rate) sc.subject = pick(cast_persons);
      if (rng.uniform() >= o.missing_role_rate) {
        std::vector<std::size_t> quotable;
        if (kind.quotes_scenes && rng.uniform() < o.nested_rate) {
          for (std::size_t j = 0; j < i; ++j) {
            if (scenes[j].depth < o.max_depth) quotable.push_back(j);
          }
        }
        if (!quotable.empty()) {
          sc.object_role = "what";
          sc.quoted_scene = quotable[rng.index(quotable.size())];
          sc.depth = scenes[*sc.quoted_scene].depth + 1;
        } else if (kind.type == "Situation") {
          const double r = rng.uniform();
          if (r < 0.5) {
            sc.object_role = "what";
            sc.object = pick(cast_objects);
          } else if (r < 0.8) {
            sc.object_role = "whom";
            sc.object = pick(cast_persons);
          } else {
            sc.object_role = "where";
            sc.object = pick(cast_places);
          }
        } else if (kind.type == "Talk") {
          sc.object_role = "whom";
          sc.object = pick(cast_persons);
        } else {
          sc.object_role = "what";
          sc.object = pick(cast_objects);
        }
      }
    }
    if (sc.object_role != "where" && rng.uniform() < 0.7) sc.where = pick(cast_places);
    if (rng.uniform() < 0.5) {
      sc.when = Term::iri(ns + "time/" + std::to_string(i / o.story_length));
    }
    scenes.push_back(std::move(sc));
  }

  auto scene_iri = [&](std::size_t i) {
    return Term::iri(ns + "scene/" + std::to_string(i + 1));
  };
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& sc = scenes[i];
    const Term id = scene_iri(i);
    out.push_back({id, rdf_type, Term::iri(kgrc::kgc(scene_kinds()[sc.kind].type))});
    out.push_back({id, Term::iri(kgrc::kgc("hasPredicate")), Term::iri(sc.predicate)});
    if (sc.subject) out.push_back({id, Term::iri(kgrc::kgc("subject")), *sc.subject});
    if (sc.object_role) {
      const Term obj = sc.quoted_scene ? scene_iri(*sc.quoted_scene) : *sc.object;
      out.push_back({id, Term::iri(kgrc::kgc(*sc.object_role)), obj});
    }
    if (sc.where) out.push_back({id, Term::iri(kgrc::kgc("where")), *sc.where});
    if (sc.when) out.push_back({id, Term::iri(kgrc::kgc("when")), *sc.when});
    if ((i + 1) % o.story_length != 0 && i + 1 < scenes.size()) {
      out.push_back({id, Term::iri(kgrc::kgc("then")), scene_iri(i + 1)});
    }
  }

  const auto converted = kgrc::convert_kgrc(out);
  fx.rdf_star = converted.triples;

  for (const auto& p : persons) fx.entity_labels.items.push_back({p.canonical(), "Person"});
  for (const auto& x : objects) fx.entity_labels.items.push_back({x.canonical(), "Object"});
  for (const auto& x : places) fx.entity_labels.items.push_back({x.canonical(), "Place"});

  // Scenes whose quoted triple is not shared with another scene.
  std::map<std::string, std::size_t> scene_index;
  for (std::size_t i = 0; i < scenes.size(); ++i) scene_index[scene_iri(i).canonical()] = i;
  std::vector<std::vector<std::pair<std::size_t, Term>>> unique_by_kind(scene_kinds().size());
  for (const auto& m : converted.scenes) {
    if (m.subject != m.qt) continue;
    const std::size_t i = scene_index.at(m.scene_id.canonical());
    unique_by_kind[scenes[i].kind].emplace_back(i, m.qt);
  }
  std::size_t per_kind = 60;
  for (const auto& v : unique_by_kind) per_kind = std::min(per_kind, v.size());
  std::set<std::string> labeled;
  for (std::size_t k = 0; k < unique_by_kind.size(); ++k) {
    for (std::size_t j = 0; j < per_kind; ++j) {
      const auto& qt = unique_by_kind[k][j].second;
      if (!labeled.insert(qt.canonical()).second) continue;
      fx.qt_labels.items.push_back({qt.canonical(), std::string(scene_kinds()[k].type)});
    }
  }

  // Relatedness: entities ranked by the number of scenes shared with a person.
  std::map<std::string, std::map<std::string, std::size_t>> together;
  for (const auto& sc : scenes) {
    std::set<std::string> members;
    if (sc.subject) members.insert(sc.subject->canonical());
    if (sc.object) members.insert(sc.object->canonical());
    if (sc.where) members.insert(sc.where->canonical());
    for (const auto& a : members) {
      for (const auto& b : members) {
        if (a != b) ++together[a][b];
      }
    }
  }
  std::vector<std::pair<std::size_t, std::string>> seeds;
  for (const auto& p : persons) {
    const auto it = together.find(p.canonical());
    if (it == together.end() || it->second.size() < o.relatedness_candidates) continue;
    std::size_t total = 0;
    for (const auto& [other, n] : it->second) total += n;
    seeds.emplace_back(total, p.canonical());
  }
  std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (seeds.size() > o.relatedness_seeds) seeds.resize(o.relatedness_seeds);
  for (const auto& [total, seed] : seeds) {
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& [other, n] : together.at(seed)) ranked.emplace_back(n, other);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    RelatednessEntry entry{seed, {}};
    for (std::size_t j = 0; j < o.relatedness_candidates; ++j) {
      entry.candidates.push_back(ranked[j].second);
    }
    fx.relatedness.entries.push_back(std::move(entry));
  }

  // Similarity: unique flat quoted triples scored by shared structure.
  std::vector<std::pair<std::size_t, Term>> flat;
  for (std::size_t k = 0; k < unique_by_kind.size(); ++k) {
    for (const auto& entry : unique_by_kind[k]) {
      if (entry.second.depth() == 1) flat.push_back(entry);
    }
  }
  std::sort(flat.begin(), flat.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  rng.shuffle(std::span(flat));
  if (flat.size() > o.similarity_qts) {
    flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(o.similarity_qts), flat.end());
  }
  for (std::size_t a = 0; a < flat.size(); ++a) {
    for (std::size_t b = a + 1; b < flat.size(); ++b) {
      const Scene& x = scenes[flat[a].first];
      const Scene& y = scenes[flat[b].first];
      const Term& qx = flat[a].second;
      const Term& qy = flat[b].second;
      double score = 1.0;
      if (qx.subject() == qy.subject()) score += 1.5;
      if (x.kind == y.kind) score += 1.0;
      if (qx.object() == qy.object()) score += 1.0;
      if (x.where && y.where && *x.where == *y.where) score += 0.5;
      fx.similarity.pairs.push_back({qx.canonical(), qy.canonical(), std::min(score, 5.0)});
    }
  }
  return fx;
}

std::string serialize_labels(const LabeledSet& set) {
  std::string out;
  for (const auto& item : set.items) out += item.token + "\t" + item.label + "\n";
  return out;
}

std::string serialize_relatedness(const RelatednessGold& gold) {
  std::string out;
  for (const auto& e : gold.entries) {
    out += e.seed + "\n";
    for (const auto& c : e.candidates) out += "\t" + c + "\n";
  }
  return out;
}

std::string serialize_similarity(const SimilarityGold& gold) {
  std::string out;
  for (const auto& p : gold.pairs) {
    out += p.qt1 + "\t" + p.qt2 + "\t" + format_double(p.score) + "\n";
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_fixture(const std::filesystem::path& dir, const Fixture& fx) {
  std::filesystem::create_directories(dir / "gold");
  write_text(dir / "reified.ttl", serialize_document(fx.reified));
  write_text(dir / "graph.ttls", serialize_document(fx.rdf_star));
  write_text(dir / "gold" / "entity_labels.tsv", serialize_labels(fx.entity_labels));
  write_text(dir / "gold" / "qt_labels.tsv", serialize_labels(fx.qt_labels));
  write_text(dir / "gold" / "relatedness.tsv", serialize_relatedness(fx.relatedness));
  write_text(dir / "gold" / "similarity.tsv", serialize_similarity(fx.similarity));
}

}  // namespace qtwalk
