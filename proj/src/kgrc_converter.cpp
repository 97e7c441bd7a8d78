#include "qtwalk/kgrc_converter.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace qtwalk::kgrc {

namespace {

constexpr std::string_view kSceneClasses[] = {"Scene", "Situation", "Statement",
                                              "Thought", "Talk"};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// "kdsb:9" < "kdsb:36" < "kdsb:100".
bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

std::optional<std::string> kgc_local(const Term& predicate) {
  if (!predicate.is_iri()) return std::nullopt;
  const auto& v = predicate.value();
  if (!v.starts_with(kKgcNamespace)) return std::nullopt;
  return v.substr(kKgcNamespace.size());
}

Term owl_nothing() { return Term::iri(std::string(kOwlNothing)); }

}  // namespace

ObjectChoice select_object(const SceneRecord& rec) {
  for (const auto role : kObjectRolePriority) {
    const auto it = rec.role_map.find(std::string(role));
    if (it != rec.role_map.end() && !it->second.empty()) {
      return ObjectChoice{it->second.front(), std::string(role)};
    }
  }
  return ObjectChoice{owl_nothing(), std::nullopt};
}

ConvertedScene convert_scene(const SceneRecord& rec,
                             const ComponentResolver& resolve) {
  if (!rec.predicate) {
    throw MissingPredicate("scene " + rec.scene_id.canonical() +
                           " has no kgc:hasPredicate");
  }
  ConvertedScene out{rec.scene_id, owl_nothing(), {}, 0};

  std::optional<Term> subject;
  std::size_t subject_index = 0;
  if (const auto it = rec.role_map.find("subject"); it != rec.role_map.end()) {
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      if (!it->second[i].is_literal()) {
        subject = it->second[i];
        subject_index = i;
        break;
      }
    }
  }
  const ObjectChoice choice = select_object(rec);

  auto component = [&](const Term& t) {
    if (resolve) {
      if (auto r = resolve(t)) return *r;
    }
    return t;
  };
  Term s = subject ? component(*subject) : owl_nothing();
  Term o = choice.role ? component(choice.object) : owl_nothing();
  if (s.is_literal()) s = owl_nothing();
  out.nothing_substitutions = (subject ? 0 : 1) + (choice.role ? 0 : 1);
  out.qt = Term::quoted(std::move(s), *rec.predicate, std::move(o));

  for (const auto& type : rec.type_terms) {
    out.metadata.push_back(
        Triple{out.qt, Term::iri(std::string(kRdfType)), type});
  }
  for (const auto& [role, values] : rec.role_map) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (subject && role == "subject" && i == subject_index) continue;
      if (choice.role && role == *choice.role && i == 0) continue;
      out.metadata.push_back(Triple{out.qt, Term::iri(kgc(role)), values[i]});
    }
  }
  for (const auto& [p, o2] : rec.extra_metadata) {
    out.metadata.push_back(Triple{out.qt, p, o2});
  }
  return out;
}

Disambiguated disambiguate_duplicates(std::span<const ConvertedScene> scenes,
                                      const ConverterOptions& options) {
  std::unordered_map<std::string, std::size_t> occurrences;
  for (const auto& scene : scenes) ++occurrences[scene.qt.canonical()];

  Disambiguated out;
  std::unordered_map<std::string, std::size_t> next_id;
  const Term id_predicate = Term::iri(options.id_predicate);
  for (const auto& scene : scenes) {
    Term subject = scene.qt;
    if (occurrences[scene.qt.canonical()] > 1) {
      const std::size_t id = ++next_id[scene.qt.canonical()];
      subject = Term::quoted(scene.qt, id_predicate,
                             Term::literal(std::to_string(id),
                                           std::string(kXsdInteger)));
      ++out.wrapped;
    }
    for (const auto& m : scene.metadata) {
      out.triples.push_back(Triple{subject, m.predicate, m.object});
    }
    out.subjects.push_back(std::move(subject));
  }
  return out;
}

std::vector<SceneRecord> extract_scenes(std::span<const Triple> triples,
                                        std::vector<Triple>* passthrough) {
  const Term has_predicate = Term::iri(kgc("hasPredicate"));
  const Term rdf_type = Term::iri(std::string(kRdfType));
  std::set<std::string> scene_classes;
  for (const auto c : kSceneClasses) scene_classes.insert(kgc(c));

  std::unordered_set<std::string> scene_ids;
  for (const auto& t : triples) {
    if (t.subject.is_quoted()) continue;
    if (t.predicate == has_predicate) scene_ids.insert(t.subject.canonical());
    if (t.predicate == rdf_type && t.object.is_iri() &&
        scene_classes.contains(t.object.value())) {
      scene_ids.insert(t.subject.canonical());
    }
    if (const auto role = kgc_local(t.predicate)) {
      if (std::find(std::begin(kObjectRolePriority),
                    std::end(kObjectRolePriority),
                    *role) != std::end(kObjectRolePriority) ||
          *role == "subject") {
        scene_ids.insert(t.subject.canonical());
      }
    }
  }

  std::unordered_map<std::string, std::size_t> index;
  std::vector<SceneRecord> records;
  for (const auto& t : triples) {
    if (!scene_ids.contains(t.subject.canonical())) {
      if (passthrough) passthrough->push_back(t);
      continue;
    }
    auto [it, inserted] = index.emplace(t.subject.canonical(), records.size());
    if (inserted) records.push_back(SceneRecord{t.subject, {}, {}, {}, {}});
    auto& rec = records[it->second];
    if (t.predicate == has_predicate && !rec.predicate && t.object.is_iri()) {
      rec.predicate = t.object;
    } else if (t.predicate == rdf_type) {
      rec.type_terms.push_back(t.object);
    } else if (const auto role = kgc_local(t.predicate)) {
      rec.role_map[*role].push_back(t.object);
    } else {
      rec.extra_metadata.emplace_back(t.predicate, t.object);
    }
  }
  for (auto& rec : records) {
    std::sort(rec.type_terms.begin(), rec.type_terms.end());
    rec.type_terms.erase(
        std::unique(rec.type_terms.begin(), rec.type_terms.end()),
        rec.type_terms.end());
    for (auto& [role, values] : rec.role_map) {
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
    }
  }
  std::sort(records.begin(), records.end(),
            [](const SceneRecord& a, const SceneRecord& b) {
              return natural_less(a.scene_id.canonical(),
                                  b.scene_id.canonical());
            });
  return records;
}

ConversionResult convert_kgrc(std::span<const Triple> triples,
                              const ConverterOptions& options) {
  ConversionResult result;
  std::vector<Triple> passthrough;
  const auto records = extract_scenes(triples, &passthrough);

  std::unordered_map<std::string, const SceneRecord*> by_id;
  for (const auto& rec : records) {
    if (rec.predicate) {
      by_id.emplace(rec.scene_id.canonical(), &rec);
    } else {
      result.report.dropped_scenes.emplace_back(rec.scene_id.canonical(),
                                                "MissingPredicate");
    }
  }

  // Bare quoted triple of every convertible scene. A scene used as the
  // subject or object of another scene is replaced by its quoted triple,
  // which is where nesting comes from. Reference cycles are cut by keeping
  // the scene IRI.
  std::unordered_map<std::string, Term> base_qt;
  std::unordered_set<std::string> in_progress;
  std::function<std::optional<Term>(const Term&)> resolve;
  std::function<Term(const SceneRecord&)> qt_of = [&](const SceneRecord& rec) {
    const auto& key = rec.scene_id.canonical();
    if (const auto it = base_qt.find(key); it != base_qt.end()) {
      return it->second;
    }
    in_progress.insert(key);
    Term qt = convert_scene(rec, resolve).qt;
    in_progress.erase(key);
    base_qt.emplace(key, qt);
    return qt;
  };
  resolve = [&](const Term& t) -> std::optional<Term> {
    const auto it = by_id.find(t.canonical());
    if (it == by_id.end()) return std::nullopt;
    if (in_progress.contains(t.canonical())) {
      ++result.report.cyclic_references;
      return std::nullopt;
    }
    return qt_of(*it->second);
  };

  std::vector<ConvertedScene> converted;
  for (const auto& rec : records) {
    if (!rec.predicate) continue;
    const Term qt = qt_of(rec);
    auto scene = convert_scene(rec, resolve);
    // Inside a reference cycle the second conversion sees the other scenes
    // fully resolved; keep the form that other scenes quote.
    if (scene.qt != qt) {
      for (auto& m : scene.metadata) m.subject = qt;
      scene.qt = qt;
    }
    result.report.nothing_substitutions += scene.nothing_substitutions;
    converted.push_back(std::move(scene));
  }
  result.report.scenes_converted = converted.size();

  auto dis = disambiguate_duplicates(converted, options);
  result.report.duplicates_disambiguated = dis.wrapped;

  std::unordered_map<std::string, Term> link_target;
  for (std::size_t i = 0; i < converted.size(); ++i) {
    result.scenes.push_back(
        SceneMapping{converted[i].scene_id, converted[i].qt, dis.subjects[i]});
    link_target.emplace(converted[i].scene_id.canonical(),
                        options.link_to_wrapper ? dis.subjects[i]
                                                : converted[i].qt);
  }
  auto relink = [&](Triple t) {
    if (const auto it = link_target.find(t.object.canonical());
        it != link_target.end()) {
      t.object = it->second;
    }
    return t;
  };
  result.triples.reserve(dis.triples.size() + passthrough.size());
  for (auto& t : dis.triples) result.triples.push_back(relink(std::move(t)));
  for (auto& t : passthrough) result.triples.push_back(relink(std::move(t)));
  return result;
}

std::string ConversionReport::to_tsv() const {
  std::string out;
  out += "scenes_converted\t" + std::to_string(scenes_converted) + "\n";
  out += "nothing_substitutions\t" + std::to_string(nothing_substitutions) + "\n";
  out += "duplicates_disambiguated\t" +
         std::to_string(duplicates_disambiguated) + "\n";
  out += "cyclic_references\t" + std::to_string(cyclic_references) + "\n";
  out += "dropped_scenes\t" + std::to_string(dropped_scenes.size()) + "\n";
  for (const auto& [id, reason] : dropped_scenes) {
    out += "dropped\t" + id + "\t" + reason + "\n";
  }
  return out;
}

}  // namespace qtwalk::kgrc
