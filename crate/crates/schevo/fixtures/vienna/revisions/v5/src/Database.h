#import <Foundation/Foundation.h>

@interface Database : NSObject
-(BOOL)initDatabase:(NSString *)databaseFileName;
@end
