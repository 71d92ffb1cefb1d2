/* Minimal consumer of the swipt-relay C ABI: configure a mission, run one
 * harvesting cycle, and ask the optimizer for the harvesting split.
 *
 * Build (from the workspace root, after `cargo build --release`):
 *   cc crates/swipt-relay-ffi/examples/relay_cycle.c \
 *      -Icrates/swipt-relay-ffi/include \
 *      target/release/libswipt_relay_ffi.a -lpthread -lm -o relay_cycle
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "swipt_relay.h"

static void fail(const char *what) {
    char *message = swipt_relay_last_error_message();
    fprintf(stderr, "%s failed: %s\n", what, message ? message : "(no message)");
    swipt_relay_string_free(message);
    exit(1);
}

int main(void) {
    printf("swipt-relay %s\n", swipt_relay_version());

    SwiptRelayConfig *config = swipt_relay_config_new();
    if (swipt_relay_config_set(config, "mission.altitude_net1", "700") != SWIPT_RELAY_STATUS_OK ||
        swipt_relay_config_set(config, "mission.user_density", "2e-5") != SWIPT_RELAY_STATUS_OK ||
        swipt_relay_config_set(config, "mission.seed", "7") != SWIPT_RELAY_STATUS_OK) {
        fail("config_set");
    }

    double hover = 0.0;
    if (swipt_relay_propulsion_power(config, 0.0, &hover) != SWIPT_RELAY_STATUS_OK) {
        fail("propulsion_power");
    }
    printf("hover power: %.3f W\n", hover);

    char *report = NULL;
    if (swipt_relay_run_cycle_json(config, 'B', &report) != SWIPT_RELAY_STATUS_OK) {
        fail("run_cycle");
    }
    printf("cycle report (JSON, %zu bytes)\n", strlen(report));
    swipt_relay_string_free(report);

    char *optimum = NULL;
    if (swipt_relay_optimize_json(config, false, 2001, &optimum) != SWIPT_RELAY_STATUS_OK) {
        fail("optimize");
    }
    printf("%s\n", optimum);
    swipt_relay_string_free(optimum);

    swipt_relay_config_free(config);
    return 0;
}
