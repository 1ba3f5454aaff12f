// schema_migration.cc
#include "sqlite/sqlite3.h"
#include "schema_migration.hh"

static void
migrate(sqlite3 * sql, char ** errmsg)
{
	int res;
	res = logged_sqlite3_exec(sql, "SELECT id FROM files WHERE id = '%q'", NULL, NULL, errmsg);
	res = logged_sqlite3_exec(sql, "CREATE TABLE file_deltas\n"
	 "\t(\n"
	 "\tid not null,    -- strong hash of file contents\n"
	 "\tbase not null,  -- joins with files.id or file_deltas.id\n"
	 "\tdelta not null, -- compressed [...]\n"
	 "\tunique(id, base)\n"
	 "\t)", NULL, NULL, errmsg);
	exec(sql, "CREATE TABLE manifest_deltas\n"
	     "\t(\n"
	     "\tid not null,\n"
	     "\tbase not null,\n"
	     "\tdelta not null,\n"
	     "\tunique(id, base)\n"
	     "\t)", NULL, NULL, errmsg);
	exec(sql, "CREATE TABLE db_vars\n"
	     "\t(\n"
	     "\tdomain not null,\n"
	     "\tname not null,\n"
	     "\tvalue not null,\n"
	     "\tunique(domain, name)\n"
	     "\t)", NULL, NULL, errmsg);
	res = logged_sqlite3_exec(sql, "DELETE FROM %s WHERE id = %d", NULL, NULL, errmsg);
}
