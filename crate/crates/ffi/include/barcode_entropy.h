#ifndef BARCODE_ENTROPY_H
#define BARCODE_ENTROPY_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Output format for [`be_report_render`].
typedef enum BeReportFormat {
  BE_REPORT_FORMAT_TABLE = 0,
  BE_REPORT_FORMAT_CSV = 1,
  BE_REPORT_FORMAT_JSON = 2,
} BeReportFormat;

// Result of a fallible call. Values 2 to 5 match the CLI exit codes.
typedef enum BeStatus {
  BE_STATUS_OK = 0,
  // A required pointer argument was NULL.
  BE_STATUS_NULL_POINTER = 1,
  // Invalid parameter or index.
  BE_STATUS_CONFIG = 2,
  // Unreadable or malformed input.
  BE_STATUS_IO = 3,
  // The simplex budget was exceeded.
  BE_STATUS_BUDGET = 4,
  // Nothing to classify.
  BE_STATUS_DEGENERATE = 5,
  // The library panicked; the handle arguments should not be reused.
  BE_STATUS_PANIC = 6,
} BeStatus;

// Opaque barcode with capped essential classes.
typedef struct BeBarcode BeBarcode;

// Opaque point cloud.
typedef struct BePointCloud BePointCloud;

// Opaque classification report.
typedef struct BeReport BeReport;

// One persistence interval. Essential classes carry the barcode cap as death.
typedef struct BeInterval {
  size_t dim;
  double birth;
  double death;
} BeInterval;

// One classified interval, longest first.
typedef struct BeReportRow {
  // 1-based rank by decreasing length.
  size_t index;
  double length;
  double share;
  double substitute;
  double substitute_share;
  double entropy;
  double normalized_entropy;
  double relative_gain;
  double threshold;
  bool feature;
  // Homology dimension of the source interval, or -1 for bare lengths.
  int32_t dim;
  double birth;
  double death;
} BeReportRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *be_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *be_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void be_string_free(char *s);

// Copies `count` points of dimension `dim`, stored row by row in `coords`.
//
// # Safety
// `coords` must point to `count * dim` readable doubles; `out` must be writable.
enum BeStatus be_point_cloud_new(const double *coords,
                                 size_t count,
                                 size_t dim,
                                 struct BePointCloud **out);

// Reads a CSV or whitespace-separated point file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum BeStatus be_point_cloud_load(const char *path, struct BePointCloud **out);

// Seeded sample of `count` points on a circle about the origin.
//
// # Safety
// `out` must be writable.
enum BeStatus be_point_cloud_sample_circle(size_t count,
                                           double radius,
                                           uint64_t seed,
                                           struct BePointCloud **out);

// Seeded sample of `count` points on a torus about the z-axis: a jittered
// grid when `stratified` is true, otherwise uniform angles.
//
// # Safety
// `out` must be writable.
enum BeStatus be_point_cloud_sample_torus(size_t count,
                                          double major,
                                          double minor,
                                          uint64_t seed,
                                          bool stratified,
                                          struct BePointCloud **out);

// Number of points; 0 for NULL.
//
// # Safety
// `cloud` must be NULL or a live handle.
size_t be_point_cloud_len(const struct BePointCloud *cloud);

// Ambient dimension; 0 for NULL.
//
// # Safety
// `cloud` must be NULL or a live handle.
size_t be_point_cloud_dim(const struct BePointCloud *cloud);

// Copies the coordinates of point `index` into `coords`.
//
// # Safety
// `cloud` must be a live handle and `coords` must have room for
// `be_point_cloud_dim(cloud)` doubles.
enum BeStatus be_point_cloud_point(const struct BePointCloud *cloud, size_t index, double *coords);

// Largest pairwise distance.
//
// # Safety
// `cloud` must be a live handle; `out` must be writable.
enum BeStatus be_point_cloud_diameter(const struct BePointCloud *cloud, double *out);

// Releases a point cloud. NULL is ignored.
//
// # Safety
// `cloud` must be NULL or a handle not yet freed.
void be_point_cloud_free(struct BePointCloud *cloud);

// Barcode of the Rips filtration on the radius scale, with simplices up to
// `max_dim` and values up to `threshold` (pass infinity for the full
// filtration). Essential classes end at the threshold, or at half the
// diameter for the full filtration. `budget` caps the simplex count.
//
// # Safety
// `cloud` must be a live handle; `out` must be writable.
enum BeStatus be_compute_barcode(const struct BePointCloud *cloud,
                                 size_t max_dim,
                                 double threshold,
                                 size_t budget,
                                 struct BeBarcode **out);

// Parses the text barcode format written by the CLI.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum BeStatus be_barcode_from_text(const char *text, struct BeBarcode **out);

// Serializes a barcode in the text format; free the result with
// [`be_string_free`].
//
// # Safety
// `barcode` must be a live handle; `out` must be writable.
enum BeStatus be_barcode_to_text(const struct BeBarcode *barcode, char **out);

// Number of intervals; 0 for NULL.
//
// # Safety
// `barcode` must be NULL or a live handle.
size_t be_barcode_len(const struct BeBarcode *barcode);

// Death value given to essential classes, or NaN if none was applied.
//
// # Safety
// `barcode` must be NULL or a live handle.
double be_barcode_cap(const struct BeBarcode *barcode);

// Copies interval `index`.
//
// # Safety
// `barcode` must be a live handle; `out` must be writable.
enum BeStatus be_barcode_get(const struct BeBarcode *barcode, size_t index, struct BeInterval *out);

// Releases a barcode. NULL is ignored.
//
// # Safety
// `barcode` must be NULL or a handle not yet freed.
void be_barcode_free(struct BeBarcode *barcode);

// Separates features from noise by persistent entropy. A negative `dim`
// classifies all intervals together; otherwise only intervals of that
// homology dimension are used. Zero-length intervals are left out.
//
// # Safety
// `barcode` must be a live handle; `out` must be writable.
enum BeStatus be_classify(const struct BeBarcode *barcode, int32_t dim, struct BeReport **out);

// Classifies bare lengths, which must be positive and finite.
//
// # Safety
// `lengths` must point to `count` readable doubles; `out` must be writable.
enum BeStatus be_classify_lengths(const double *lengths, size_t count, struct BeReport **out);

// Number of classified intervals; 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t be_report_len(const struct BeReport *report);

// Number of rows flagged as features; 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t be_report_feature_count(const struct BeReport *report);

// Persistent entropy (natural log) of the classified lengths; NaN for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
double be_report_entropy(const struct BeReport *report);

// Copies row `index` (0-based; rows are ordered longest first).
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum BeStatus be_report_row(const struct BeReport *report, size_t index, struct BeReportRow *out);

// Renders the report; free the result with [`be_string_free`].
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum BeStatus be_report_render(const struct BeReport *report,
                               enum BeReportFormat format,
                               char **out);

// Releases a report. NULL is ignored.
//
// # Safety
// `report` must be NULL or a handle not yet freed.
void be_report_free(struct BeReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BARCODE_ENTROPY_H */
