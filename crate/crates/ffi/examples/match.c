/* Tag a ratings file and rank the resources for one learner.
 *
 *   cc match.c -I../include -L../../../target/release -llearntag_ffi -o match
 *   ./match ratings.csv
 */
#include <stdio.h>

#include "learntag.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        fprintf(stderr, "usage: %s RATINGS [PROFILES]\n", argv[0]);
        return 1;
    }
    LtConfig config = lt_config_default();
    config.seed = 7;

    LtStore *store = NULL;
    double strategy[5], presentation[5];
    LtStatus status = lt_run_files(argv[1], argc > 2 ? argv[2] : NULL, 0, &config,
                                   &store, strategy, presentation);
    if (status != LT_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", status, lt_last_error_message());
        return 2;
    }
    printf("%zu resources\n", lt_store_len(store));

    LtProfile learner = {.current_skill = 2, .target_skill = 5, .strategy = 3,
                         .presentation = 4, .learning_time = 25};
    LtMatches *matches = NULL;
    status = lt_match(store, &learner, strategy, presentation, 5, &matches);
    if (status == LT_STATUS_OK) {
        for (size_t i = 0; i < lt_matches_len(matches); i++) {
            char *tags = NULL;
            const char *id = lt_matches_resource(matches, i);
            lt_store_render(store, id, &tags);
            printf("%s\t%.3f\t%s\n", id, lt_matches_score(matches, i), tags ? tags : "");
            lt_string_free(tags);
        }
    }
    lt_matches_free(matches);
    lt_store_free(store);
    return status == LT_STATUS_OK ? 0 : 2;
}
