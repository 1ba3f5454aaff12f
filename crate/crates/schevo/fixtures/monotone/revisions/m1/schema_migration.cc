// schema_migration.cc
#include "sqlite/sqlite3.h"
#include "schema_migration.hh"

static void
migrate(sqlite3 * sql, char ** errmsg)
{
	int res;
	res = logged_sqlite3_exec(sql, "SELECT id FROM files WHERE id = '%q'", NULL, NULL, errmsg);
	res = logged_sqlite3_exec(sql, "DELETE FROM %s WHERE id = %d", NULL, NULL, errmsg);
}
