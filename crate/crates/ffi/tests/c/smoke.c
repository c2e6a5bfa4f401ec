#include <stdio.h>
#include <string.h>
#include "peisert.h"

int main(void) {
    PeisertField *f = NULL;
    if (peisert_field_new(3, 2, &f) != PEISERT_STATUS_OK) return 10;
    if (peisert_field_order(f) != 9) return 11;
    char *json = NULL;
    if (peisert_critical_group_json(f, PEISERT_GRAPH_PEISERT, PEISERT_METHOD_BOTH, false, true, &json)
        != PEISERT_STATUS_OK) return 12;
    int ok = strstr(json, "\"spanning_trees\":\"11664\"") != NULL;
    peisert_string_free(json);
    peisert_field_free(f);
    if (!ok) return 13;
    if (peisert_field_new(5, 0, &f) != PEISERT_STATUS_INVALID_PARAMETER) return 14;
    if (peisert_last_error() == NULL) return 15;
    puts("ok");
    return 0;
}
