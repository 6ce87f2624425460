#include <stdio.h>
#include <string.h>

#include "qgroupoid.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        return 2;
    }
    FILE *f = fopen(argv[1], "rb");
    if (!f) {
        return 2;
    }
    static char buf[1 << 20];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[n] = '\0';

    QgReport *report = NULL;
    if (qg_verify_json(buf, 1e-9, &report) != QG_STATUS_OK) {
        fprintf(stderr, "verify: %s\n", qg_last_error());
        return 2;
    }
    char *json = NULL;
    if (qg_report_to_json(report, &json) != QG_STATUS_OK || strstr(json, "\"summary\"") == NULL) {
        return 2;
    }
    printf("pass=%d checks=%zu failed=%zu\n", qg_report_pass(report), qg_report_check_count(report),
           qg_report_failed_count(report));
    int code = qg_report_pass(report) ? 0 : 1;
    qg_string_free(json);
    qg_report_free(report);

    if (qg_verify_json("{", 1e-9, &report) != QG_STATUS_PARSE || report != NULL || qg_last_error()[0] == '\0') {
        return 3;
    }
    return code;
}
