res = logged_sqlite3_exec(sql, "CREATE TABLE file_deltas\n"
 "\t(\n"
 "\tid not null,    -- strong hash of file contents\n"
 "\tbase not null,  -- joins with files.id or file_deltas.id\n"
 "\tdelta not null, -- compressed [...]\n"
 "\tunique(id, base)\n"
 "\t)", NULL, NULL, errmsg);
