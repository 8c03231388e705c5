#ifndef ARCINTERP_H
#define ARCINTERP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AiOrdering {
  AI_ORDERING_AS_GIVEN = 0,
  AI_ORDERING_LEJA = 1,
  AI_ORDERING_AUTO = 2,
} AiOrdering;

typedef enum AiStatus {
  AI_STATUS_OK = 0,
  AI_STATUS_NULL_POINTER = 1,
  AI_STATUS_INVALID_ARGUMENT = 2,
  AI_STATUS_DEGENERATE_ARC = 3,
  AI_STATUS_NODES_TOO_CLOSE = 4,
  AI_STATUS_INSUFFICIENT_ORDER = 5,
  AI_STATUS_NOT_APPLICABLE = 6,
  AI_STATUS_ESTIMATION_UNSTABLE = 7,
  AI_STATUS_NO_CONVERGENCE = 8,
  AI_STATUS_COMPUTATION = 9,
  AI_STATUS_PANIC = 10,
} AiStatus;

// Opaque arc handle.
typedef struct AiArc AiArc;

// Opaque handle to a function composed with an arc.
typedef struct AiFunction AiFunction;

// Opaque Newton interpolant handle.
typedef struct AiInterpolant AiInterpolant;

typedef struct AiComplex {
  double re;
  double im;
} AiComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *ai_last_error_message(void);

// Arc by name (`segment`, `circle`, `half-circle`, `ellipse-arc`) or JSON spec.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum AiStatus ai_arc_from_text(const char *name, struct AiArc **out);

// Segment from `a` to `b`.
//
// # Safety
// `out` must be writable.
enum AiStatus ai_arc_segment(struct AiComplex a, struct AiComplex b, struct AiArc **out);

// Full circle, counter-clockwise from `center + radius`.
//
// # Safety
// `out` must be writable.
enum AiStatus ai_arc_circle(struct AiComplex center, double radius, struct AiArc **out);

// Circular arc over the angles `[angle_start, angle_end]`.
//
// # Safety
// `out` must be writable.
enum AiStatus ai_arc_circular(struct AiComplex center,
                              double radius,
                              double angle_start,
                              double angle_end,
                              struct AiArc **out);

// Ellipse arc `center + a cos(s) + i b sin(s)` over `s` in `[angle_start, angle_end]`.
//
// # Safety
// `out` must be writable.
enum AiStatus ai_arc_ellipse(struct AiComplex center,
                             double semi_a,
                             double semi_b,
                             double angle_start,
                             double angle_end,
                             struct AiArc **out);

// `phi(t)`.
//
// # Safety
// `arc` must come from an `ai_arc_*` constructor; `out` must be writable.
enum AiStatus ai_arc_point(const struct AiArc *arc, double t, struct AiComplex *out);

// # Safety
// `arc` must be null or a handle not yet freed.
void ai_arc_free(struct AiArc *arc);

// Built-in function (`exp`, `sin`, `conj`, `abs2`, `z3+conj`, ... or JSON spec)
// composed with `arc`. The handle keeps its own copy of the arc.
//
// # Safety
// `arc` must be a live handle, `name` NUL-terminated, `out` writable.
enum AiStatus ai_function_builtin(const struct AiArc *arc,
                                  const char *name,
                                  struct AiFunction **out);

// # Safety
// `f` must be null or a handle not yet freed.
void ai_function_free(struct AiFunction *f);

// Divided difference `d_n` at the nodes `phi(params[k])`, `n = count - 1`.
//
// # Safety
// `params` must hold `count` doubles; `out` must be writable.
enum AiStatus ai_divided_difference(const struct AiFunction *f,
                                    const double *params,
                                    size_t count,
                                    struct AiComplex *out);

// # Safety
// `params` must hold `count` doubles; `out` must be writable.
enum AiStatus ai_interp_build(const struct AiFunction *f,
                              const double *params,
                              size_t count,
                              enum AiOrdering ordering,
                              struct AiInterpolant **out);

// `p_n(z)` for any complex `z`.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum AiStatus ai_interp_eval(const struct AiInterpolant *p,
                             struct AiComplex z,
                             struct AiComplex *out);

// # Safety
// `p` must be null or a handle not yet freed.
void ai_interp_free(struct AiInterpolant *p);

// Bound certificate as JSON. `grid = 0` selects the default constant grid.
// Release the string with [`ai_string_free`].
//
// # Safety
// `params` must hold `count` doubles; `out` must be writable.
enum AiStatus ai_bound_certificate_json(const struct AiFunction *f,
                                        const double *params,
                                        size_t count,
                                        size_t grid,
                                        char **out);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void ai_string_free(char *s);

// `min_{i != j} prod_{m not in {i,j}} (1 + |z_i - z_m|)` and its minimizing pair.
//
// # Safety
// `points` must hold `count` values; the outputs must be writable.
enum AiStatus ai_minimize_pivot_product(const struct AiComplex *points,
                                        size_t count,
                                        size_t *pivot_index,
                                        size_t *excluded_index,
                                        double *value);

// Recursion value and closed form of the sequence bound; `l` holds `L_2..L_n`.
//
// # Safety
// `l` must hold `count` doubles; the outputs must be writable.
enum AiStatus ai_lemma_sequence_bound(double c,
                                      const double *l,
                                      size_t count,
                                      size_t n,
                                      double *i_hat,
                                      double *closed_form);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARCINTERP_H */
