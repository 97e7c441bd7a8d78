#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtwalk/errors.hpp"
#include "qtwalk/term.hpp"

// Conversion of reified scene graphs (one node per scene carrying
// kgc:hasPredicate, kgc:subject, kgc:what, ...) into RDF-star, where each
// scene becomes a quoted triple annotated with its remaining roles.
namespace qtwalk::kgrc {

inline constexpr std::string_view kKgcNamespace =
    "http://kgc.knowledge-graph.jp/ontology/kgc.owl#";

inline std::string kgc(std::string_view local) {
  return std::string(kKgcNamespace) + std::string(local);
}

// Roles that may supply the object of a scene's quoted triple, highest
// priority first.
inline constexpr std::string_view kObjectRolePriority[] = {
    "what", "whom", "where", "on", "to", "from"};

class MissingPredicate : public InputError {
 public:
  using InputError::InputError;
};

struct SceneRecord {
  Term scene_id;
  std::optional<Term> predicate;
  // kgc role local name -> values in canonical order.
  std::map<std::string, std::vector<Term>> role_map;
  std::vector<Term> type_terms;
  // Non-kgc (predicate, object) pairs in input order.
  std::vector<std::pair<Term, Term>> extra_metadata;
};

struct ObjectChoice {
  Term object;
  // Role that supplied the object; nullopt when owl:Nothing was substituted.
  std::optional<std::string> role;
};

ObjectChoice select_object(const SceneRecord& rec);

struct ConvertedScene {
  Term scene_id;
  Term qt;
  // Metadata triples with `qt` as subject. Scene references in object
  // position are still scene IRIs at this stage.
  std::vector<Triple> metadata;
  std::size_t nothing_substitutions = 0;
};

// Maps a term used as subject/object of the scene's quoted triple to a
// replacement (e.g. a referenced scene's quoted triple); nullopt keeps it.
using ComponentResolver = std::function<std::optional<Term>(const Term&)>;

// Throws MissingPredicate when the record has no kgc:hasPredicate.
ConvertedScene convert_scene(const SceneRecord& rec,
                             const ComponentResolver& resolve = {});

struct ConverterOptions {
  std::string id_predicate = kgc("sid");
  // Scene links (kgc:then, ...) to a disambiguated scene point at the
  // id-wrapper when true, at the bare quoted triple otherwise.
  bool link_to_wrapper = true;
};

struct Disambiguated {
  std::vector<Triple> triples;
  // Metadata subject chosen for each input scene (wrapper or bare QT).
  std::vector<Term> subjects;
  std::size_t wrapped = 0;
};

// Quoted triples shared by several scenes get one wrapper
// << qt id_predicate k >> per scene, k = 1, 2, ... in input order.
Disambiguated disambiguate_duplicates(std::span<const ConvertedScene> scenes,
                                      const ConverterOptions& options = {});

struct ConversionReport {
  std::size_t scenes_converted = 0;
  std::size_t nothing_substitutions = 0;
  std::size_t duplicates_disambiguated = 0;
  std::size_t cyclic_references = 0;
  std::vector<std::pair<std::string, std::string>> dropped_scenes;

  std::string to_tsv() const;
};

struct SceneMapping {
  Term scene_id;
  // Bare quoted triple of the scene.
  Term qt;
  // Subject its metadata is attached to: the id-wrapper or `qt` itself.
  Term subject;
};

struct ConversionResult {
  std::vector<Triple> triples;
  ConversionReport report;
  // One entry per converted scene, in natural scene order.
  std::vector<SceneMapping> scenes;
};

// Groups scene triples into records (natural order of scene IRIs) and
// returns every other triple through `passthrough`.
std::vector<SceneRecord> extract_scenes(std::span<const Triple> triples,
                                        std::vector<Triple>* passthrough);

ConversionResult convert_kgrc(std::span<const Triple> triples,
                              const ConverterOptions& options = {});

}  // namespace qtwalk::kgrc
