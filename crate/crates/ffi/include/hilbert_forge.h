/* C interface for hilbert-forge.  Generated; do not edit. */

#ifndef HILBERT_FORGE_H
#define HILBERT_FORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI entry point.
 */
typedef enum HfStatus {
  HfStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  HfStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  HfStatus_InvalidUtf8 = 2,
  /**
   * Formula, script, or rule set text failed to parse.
   */
  HfStatus_ParseError = 3,
  /**
   * The derivation failed to check; see `hf_last_error`.
   */
  HfStatus_CheckFailed = 4,
  /**
   * Unknown built-in rule set id.
   */
  HfStatus_UnknownRuleset = 5,
  /**
   * Semantic evaluation or enumeration failed.
   */
  HfStatus_SemanticsError = 6,
} HfStatus;

/**
 * Opaque rule set handle.
 */
typedef struct HfRuleSet HfRuleSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread.  The pointer is
 * owned by the library; do not free it.
 */
const char *hf_last_error(void);

/**
 * Free a string returned by this library.
 */
void hf_string_free(char *s);

/**
 * Parse a formula in user syntax and return its canonical printing.
 */
enum HfStatus hf_normalize_formula(const char *text, char **out);

/**
 * Build a built-in rule set (`sdm`, `sdm-reduced`, `sdm-g4`, `ockham:m:n`,
 * `omega:<class>:<n>`).
 */
enum HfStatus hf_ruleset_builtin(const char *id, struct HfRuleSet **out);

/**
 * Parse a rule set from its text form (`name: f1 , f2 |- g` lines).
 */
enum HfStatus hf_ruleset_parse(const char *id, const char *text, struct HfRuleSet **out);

/**
 * Number of rules in a rule set, or -1 on a null handle.
 */
int hf_ruleset_len(const struct HfRuleSet *rs);

/**
 * Text form of a rule set.
 */
enum HfStatus hf_ruleset_text(const struct HfRuleSet *rs, char **out);

/**
 * Free a rule set handle.
 */
void hf_ruleset_free(struct HfRuleSet *rs);

/**
 * Parse and check a derivation script against an explicit rule set.  The
 * script's `ruleset:` header is ignored in favor of `rs`.
 */
enum HfStatus hf_check_script_with(const struct HfRuleSet *rs, const char *text);

/**
 * Parse and check a derivation script, resolving its `ruleset:` header as a
 * built-in id.
 */
enum HfStatus hf_check_script(const char *text);

/**
 * Search for a finite countermodel to `goal` over the named algebra class
 * up to `max_size`.  On success, `*found` is 1 and `*witness_json` holds a
 * JSON witness if a countermodel exists, else `*found` is 0 and
 * `*witness_json` is null.  `assertional` non-zero selects ⊤-assertional
 * semantics instead of filter semantics.
 */
enum HfStatus hf_refute_goal(const char *goal,
                             const char *class_,
                             uintptr_t max_size,
                             int assertional,
                             int *found,
                             char **witness_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HILBERT_FORGE_H */
